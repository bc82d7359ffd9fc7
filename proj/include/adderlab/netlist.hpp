/*!
  \file netlist.hpp
  \brief Flat combinational gate netlist with named ports, structural
         validation, levelization and a lossless text format.

  Gate and net ids are dense and assigned in construction order. Adder
  netlists name their ports `a[i]`, `b[i]`, `cin`, `sum[i]` and `cout`.

  Text format, one record per line:

      netlist v1
      width <w>
      nets <count>
      input <name> <net>
      output <name> <net>
      tie <net> <0|1>
      gate <id> <cell> <in-net>... : <out-net>...
*/

#pragma once

#include "cell_model.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace adderlab
{

enum class net_id : std::uint32_t
{
};

constexpr std::uint32_t to_index( net_id n )
{
  return static_cast<std::uint32_t>( n );
}

struct gate_instance
{
  std::uint32_t id{};
  std::string cell;
  std::vector<net_id> inputs;
  std::vector<net_id> outputs;

  bool operator==( gate_instance const& ) const = default;
};

struct port
{
  std::string name;
  net_id net{};

  bool operator==( port const& ) const = default;
};

struct constant_tie
{
  net_id net{};
  bool value{};

  bool operator==( constant_tie const& ) const = default;
};

class netlist
{
public:
  explicit netlist( std::uint32_t width = 0u ) : width_( width ) {}

  net_id add_net()
  {
    return net_id{ num_nets_++ };
  }

  net_id add_input( std::string name )
  {
    auto const n = add_net();
    inputs_.push_back( { std::move( name ), n } );
    return n;
  }

  void add_input( std::string name, net_id n )
  {
    inputs_.push_back( { std::move( name ), n } );
  }

  void add_output( std::string name, net_id n )
  {
    outputs_.push_back( { std::move( name ), n } );
  }

  /*! \brief Net tied to a constant; one shared net per value. */
  net_id tie( bool value )
  {
    for ( auto const& t : ties_ )
    {
      if ( t.value == value )
        return t.net;
    }
    auto const n = add_net();
    ties_.push_back( { n, value } );
    return n;
  }

  void add_tie( net_id n, bool value )
  {
    ties_.push_back( { n, value } );
  }

  /*! \brief Adds a gate driving freshly allocated output nets. */
  std::vector<net_id> add_gate( std::string cell, std::vector<net_id> inputs, std::uint32_t num_outputs )
  {
    std::vector<net_id> outs( num_outputs );
    for ( auto& o : outs )
      o = add_net();
    add_gate( std::move( cell ), std::move( inputs ), outs );
    return outs;
  }

  net_id add_gate1( std::string cell, std::vector<net_id> inputs )
  {
    return add_gate( std::move( cell ), std::move( inputs ), 1u ).front();
  }

  /*! \brief Adds a gate driving existing nets (import and test construction). */
  std::uint32_t add_gate( std::string cell, std::vector<net_id> inputs, std::vector<net_id> outputs )
  {
    auto const id = static_cast<std::uint32_t>( gates_.size() );
    gates_.push_back( { id, std::move( cell ), std::move( inputs ), std::move( outputs ) } );
    return id;
  }

  void reserve_nets( std::uint32_t count )
  {
    num_nets_ = std::max( num_nets_, count );
  }

  std::uint32_t width() const
  {
    return width_;
  }

  std::uint32_t num_nets() const
  {
    return num_nets_;
  }

  std::uint32_t num_gates() const
  {
    return static_cast<std::uint32_t>( gates_.size() );
  }

  std::vector<gate_instance> const& gates() const
  {
    return gates_;
  }

  gate_instance const& gate( std::uint32_t id ) const
  {
    return gates_.at( id );
  }

  std::vector<port> const& inputs() const
  {
    return inputs_;
  }

  std::vector<port> const& outputs() const
  {
    return outputs_;
  }

  std::vector<constant_tie> const& ties() const
  {
    return ties_;
  }

  std::optional<net_id> find_input( std::string_view name ) const
  {
    for ( auto const& p : inputs_ )
      if ( p.name == name )
        return p.net;
    return std::nullopt;
  }

  std::optional<net_id> find_output( std::string_view name ) const
  {
    for ( auto const& p : outputs_ )
      if ( p.name == name )
        return p.net;
    return std::nullopt;
  }

  std::uint32_t count_cells( std::string_view cell ) const
  {
    return static_cast<std::uint32_t>(
        std::count_if( gates_.begin(), gates_.end(), [&]( auto const& g ) { return g.cell == cell; } ) );
  }

  bool operator==( netlist const& ) const = default;

private:
  std::uint32_t width_{};
  std::uint32_t num_nets_{};
  std::vector<port> inputs_;
  std::vector<port> outputs_;
  std::vector<constant_tie> ties_;
  std::vector<gate_instance> gates_;
};

inline std::string bus_name( std::string_view bus, std::uint32_t index )
{
  return std::string( bus ) + "[" + std::to_string( index ) + "]";
}

/*! \brief Port nets of an adder netlist, resolved by name. */
struct adder_ports
{
  std::uint32_t width{};
  std::vector<net_id> a, b, sum;
  net_id cin{}, cout{};
};

inline adder_ports resolve_adder_ports( netlist const& nl )
{
  adder_ports ports;
  ports.width = nl.width();
  auto const need = []( std::optional<net_id> n, std::string const& name ) {
    if ( !n )
      throw error( error_kind::invalid_netlist, "adder port " + name + " missing" );
    return *n;
  };
  if ( nl.width() == 0u )
    throw error( error_kind::invalid_width, "adder netlist has width 0" );
  for ( auto i = 0u; i < nl.width(); ++i )
  {
    ports.a.push_back( need( nl.find_input( bus_name( "a", i ) ), bus_name( "a", i ) ) );
    ports.b.push_back( need( nl.find_input( bus_name( "b", i ) ), bus_name( "b", i ) ) );
    ports.sum.push_back( need( nl.find_output( bus_name( "sum", i ) ), bus_name( "sum", i ) ) );
  }
  ports.cin = need( nl.find_input( "cin" ), "cin" );
  ports.cout = need( nl.find_output( "cout" ), "cout" );
  return ports;
}

/* Validation */

enum class issue_kind
{
  multiple_drivers,
  undriven_net,
  dangling_net,
  combinational_loop,
  unknown_cell,
  arity_mismatch,
  bad_net_id
};

inline std::string_view to_string( issue_kind kind )
{
  switch ( kind )
  {
  case issue_kind::multiple_drivers: return "MultipleDrivers";
  case issue_kind::undriven_net: return "UndrivenNet";
  case issue_kind::dangling_net: return "DanglingNet";
  case issue_kind::combinational_loop: return "CombinationalLoop";
  case issue_kind::unknown_cell: return "UnknownCell";
  case issue_kind::arity_mismatch: return "ArityMismatch";
  case issue_kind::bad_net_id: return "BadNetId";
  }
  return "Unknown";
}

struct validation_issue
{
  issue_kind kind{};
  /* offending net(s) or the gate cycle, depending on kind */
  std::vector<std::uint32_t> ids;
  std::string message;
};

namespace detail
{

/* driver of each net: gate id, or one of the sentinels below */
constexpr std::uint32_t no_driver = 0xffffffffu;
constexpr std::uint32_t port_driver = 0xfffffffeu;

inline std::vector<std::uint32_t> net_drivers( netlist const& nl )
{
  std::vector<std::uint32_t> driver( nl.num_nets(), no_driver );
  for ( auto const& p : nl.inputs() )
    if ( to_index( p.net ) < nl.num_nets() )
      driver[to_index( p.net )] = port_driver;
  for ( auto const& t : nl.ties() )
    if ( to_index( t.net ) < nl.num_nets() )
      driver[to_index( t.net )] = port_driver;
  for ( auto const& g : nl.gates() )
    for ( auto o : g.outputs )
      if ( to_index( o ) < nl.num_nets() )
        driver[to_index( o )] = g.id;
  return driver;
}

/* gate-to-gate fanin lists; assumes every net id is in range */
inline std::vector<std::vector<std::uint32_t>> gate_fanins( netlist const& nl, std::vector<std::uint32_t> const& driver )
{
  std::vector<std::vector<std::uint32_t>> fanin( nl.num_gates() );
  for ( auto const& g : nl.gates() )
  {
    for ( auto in : g.inputs )
    {
      auto const d = driver[to_index( in )];
      if ( d < nl.num_gates() )
        fanin[g.id].push_back( d );
    }
  }
  return fanin;
}

/* returns one gate cycle if the gate graph has a loop */
inline std::optional<std::vector<std::uint32_t>> find_cycle( std::vector<std::vector<std::uint32_t>> const& fanin )
{
  enum : std::uint8_t
  {
    white,
    grey,
    black
  };
  std::vector<std::uint8_t> color( fanin.size(), white );
  std::vector<std::uint32_t> parent( fanin.size(), no_driver );
  for ( auto root = 0u; root < fanin.size(); ++root )
  {
    if ( color[root] != white )
      continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{ { root, 0u } };
    color[root] = grey;
    while ( !stack.empty() )
    {
      auto& [node, next] = stack.back();
      if ( next < fanin[node].size() )
      {
        auto const succ = fanin[node][next++];
        if ( color[succ] == grey )
        {
          std::vector<std::uint32_t> cycle{ succ };
          for ( auto it = stack.rbegin(); it != stack.rend() && it->first != succ; ++it )
            cycle.push_back( it->first );
          std::reverse( cycle.begin(), cycle.end() );
          return cycle;
        }
        if ( color[succ] == white )
        {
          color[succ] = grey;
          stack.emplace_back( succ, 0u );
        }
      }
      else
      {
        color[node] = black;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

} // namespace detail

/*! \brief Checks every structural invariant; returns the list of problems
 *  (empty when the netlist is valid). */
inline std::vector<validation_issue> validate( netlist const& nl, cell_library const& lib )
{
  std::vector<validation_issue> issues;
  auto const num_nets = nl.num_nets();

  bool ids_ok = true;
  auto const check_id = [&]( net_id n, std::string const& where ) {
    if ( to_index( n ) >= num_nets )
    {
      issues.push_back( { issue_kind::bad_net_id, { to_index( n ) }, where + " references net " + std::to_string( to_index( n ) ) } );
      ids_ok = false;
    }
  };
  for ( auto const& p : nl.inputs() )
    check_id( p.net, "input " + p.name );
  for ( auto const& p : nl.outputs() )
    check_id( p.net, "output " + p.name );
  for ( auto const& t : nl.ties() )
    check_id( t.net, "tie" );
  for ( auto const& g : nl.gates() )
  {
    for ( auto n : g.inputs )
      check_id( n, "gate " + std::to_string( g.id ) );
    for ( auto n : g.outputs )
      check_id( n, "gate " + std::to_string( g.id ) );
  }
  if ( !ids_ok )
    return issues;

  for ( auto const& g : nl.gates() )
  {
    auto const* cell = lib.find( g.cell );
    if ( cell == nullptr )
    {
      issues.push_back( { issue_kind::unknown_cell, { g.id }, "gate " + std::to_string( g.id ) + " uses unknown cell " + g.cell } );
    }
    else if ( cell->num_inputs() != g.inputs.size() || cell->num_outputs() != g.outputs.size() )
    {
      issues.push_back( { issue_kind::arity_mismatch, { g.id }, "gate " + std::to_string( g.id ) + " pin count does not match cell " + g.cell } );
    }
  }

  std::vector<std::uint32_t> drivers( num_nets, 0u ), loads( num_nets, 0u );
  for ( auto const& p : nl.inputs() )
    ++drivers[to_index( p.net )];
  for ( auto const& t : nl.ties() )
    ++drivers[to_index( t.net )];
  for ( auto const& g : nl.gates() )
  {
    for ( auto n : g.outputs )
      ++drivers[to_index( n )];
    for ( auto n : g.inputs )
      ++loads[to_index( n )];
  }
  for ( auto const& p : nl.outputs() )
    ++loads[to_index( p.net )];

  for ( auto n = 0u; n < num_nets; ++n )
  {
    if ( drivers[n] > 1u )
      issues.push_back( { issue_kind::multiple_drivers, { n }, "net " + std::to_string( n ) + " has " + std::to_string( drivers[n] ) + " drivers" } );
    else if ( drivers[n] == 0u )
      issues.push_back( { issue_kind::undriven_net, { n }, "net " + std::to_string( n ) + " has no driver" } );
  }

  /* internal nets (gate outputs and ties) must have a load */
  std::vector<bool> internal( num_nets, false );
  for ( auto const& t : nl.ties() )
    internal[to_index( t.net )] = true;
  for ( auto const& g : nl.gates() )
    for ( auto n : g.outputs )
      internal[to_index( n )] = true;
  for ( auto n = 0u; n < num_nets; ++n )
  {
    if ( internal[n] && loads[n] == 0u )
      issues.push_back( { issue_kind::dangling_net, { n }, "net " + std::to_string( n ) + " drives nothing" } );
  }

  auto const driver = detail::net_drivers( nl );
  if ( auto cycle = detail::find_cycle( detail::gate_fanins( nl, driver ) ) )
  {
    std::string msg = "gate cycle";
    for ( auto g : *cycle )
      msg += " " + std::to_string( g );
    issues.push_back( { issue_kind::combinational_loop, std::move( *cycle ), std::move( msg ) } );
  }
  return issues;
}

inline std::string format_issues( std::vector<validation_issue> const& issues )
{
  std::string text;
  for ( auto const& i : issues )
  {
    if ( !text.empty() )
      text += "; ";
    text += std::string( to_string( i.kind ) ) + ": " + i.message;
  }
  return text;
}

/*! \brief Throws `invalid_netlist` (or `combinational_loop`) listing every issue. */
inline void require_valid( netlist const& nl, cell_library const& lib )
{
  auto const issues = validate( nl, lib );
  if ( issues.empty() )
    return;
  auto const loop = std::any_of( issues.begin(), issues.end(), []( auto const& i ) { return i.kind == issue_kind::combinational_loop; } );
  throw error( loop ? error_kind::combinational_loop : error_kind::invalid_netlist, format_issues( issues ) );
}

/* Levelization */

struct schedule
{
  /* gates per level, each sorted by id; level k holds gates of depth k+1 */
  std::vector<std::vector<std::uint32_t>> levels;
  /* level of each gate, 1-based (ports are level 0) */
  std::vector<std::uint32_t> gate_level;

  std::uint32_t depth() const
  {
    return static_cast<std::uint32_t>( levels.size() );
  }

  std::vector<std::uint32_t> order() const
  {
    std::vector<std::uint32_t> flat;
    for ( auto const& lvl : levels )
      flat.insert( flat.end(), lvl.begin(), lvl.end() );
    return flat;
  }
};

/*! \brief Groups gates by depth: level(g) = 1 + max level of its driving gates. */
inline schedule levelize( netlist const& nl )
{
  for ( auto const& g : nl.gates() )
  {
    for ( auto n : g.inputs )
      if ( to_index( n ) >= nl.num_nets() )
        throw error( error_kind::invalid_netlist, "gate " + std::to_string( g.id ) + " references unknown net" );
    for ( auto n : g.outputs )
      if ( to_index( n ) >= nl.num_nets() )
        throw error( error_kind::invalid_netlist, "gate " + std::to_string( g.id ) + " references unknown net" );
  }
  auto const driver = detail::net_drivers( nl );
  auto const fanin = detail::gate_fanins( nl, driver );
  auto const n = nl.num_gates();

  std::vector<std::vector<std::uint32_t>> fanout( n );
  std::vector<std::uint32_t> pending( n, 0u );
  for ( auto g = 0u; g < n; ++g )
  {
    pending[g] = static_cast<std::uint32_t>( fanin[g].size() );
    for ( auto d : fanin[g] )
      fanout[d].push_back( g );
  }

  schedule sched;
  sched.gate_level.assign( n, 0u );
  std::vector<std::uint32_t> ready;
  for ( auto g = 0u; g < n; ++g )
    if ( pending[g] == 0u )
      ready.push_back( g );

  std::uint32_t placed = 0u;
  std::uint32_t level = 1u;
  while ( !ready.empty() )
  {
    std::sort( ready.begin(), ready.end() );
    std::vector<std::uint32_t> next;
    for ( auto g : ready )
    {
      sched.gate_level[g] = level;
      for ( auto s : fanout[g] )
        if ( --pending[s] == 0u )
          next.push_back( s );
    }
    placed += static_cast<std::uint32_t>( ready.size() );
    sched.levels.push_back( std::move( ready ) );
    ready = std::move( next );
    ++level;
  }
  if ( placed != n )
  {
    throw error( error_kind::combinational_loop, std::to_string( n - placed ) + " gates lie on or behind a combinational loop" );
  }
  return sched;
}

/* Text format */

inline void write_netlist( std::ostream& os, netlist const& nl )
{
  os << "netlist v1\n";
  os << "width " << nl.width() << "\n";
  os << "nets " << nl.num_nets() << "\n";
  for ( auto const& p : nl.inputs() )
    os << "input " << p.name << " " << to_index( p.net ) << "\n";
  for ( auto const& p : nl.outputs() )
    os << "output " << p.name << " " << to_index( p.net ) << "\n";
  for ( auto const& t : nl.ties() )
    os << "tie " << to_index( t.net ) << " " << ( t.value ? 1 : 0 ) << "\n";
  for ( auto const& g : nl.gates() )
  {
    os << "gate " << g.id << " " << g.cell;
    for ( auto n : g.inputs )
      os << " " << to_index( n );
    os << " :";
    for ( auto n : g.outputs )
      os << " " << to_index( n );
    os << "\n";
  }
}

inline netlist read_netlist( std::istream& is, std::string const& source = "netlist" )
{
  std::string line;
  std::size_t line_no = 0u;
  std::optional<netlist> nl;
  bool header = false;
  std::uint32_t declared_nets = 0u;

  auto const net = [&]( std::string_view tok, std::string const& where ) {
    auto const v = detail::parse_uint( tok, where );
    if ( v >= declared_nets )
      throw error( error_kind::parse_error, where + ": net " + std::string( tok ) + " exceeds declared net count" );
    return net_id{ static_cast<std::uint32_t>( v ) };
  };

  while ( std::getline( is, line ) )
  {
    ++line_no;
    auto const tokens = detail::tokenize( detail::strip_comment( line ) );
    if ( tokens.empty() )
      continue;
    auto const where = source + ":" + std::to_string( line_no );
    auto const& key = tokens[0];
    auto const expect = [&]( std::size_t count ) {
      if ( tokens.size() != count )
        throw error( error_kind::parse_error, where + ": malformed '" + std::string( key ) + "' record" );
    };

    if ( !header )
    {
      if ( key != "netlist" || tokens.size() != 2u || tokens[1] != "v1" )
        throw error( error_kind::parse_error, where + ": expected 'netlist v1' header" );
      header = true;
    }
    else if ( key == "width" )
    {
      expect( 2u );
      nl.emplace( static_cast<std::uint32_t>( detail::parse_uint( tokens[1], where ) ) );
    }
    else if ( !nl )
    {
      throw error( error_kind::parse_error, where + ": 'width' must precede other records" );
    }
    else if ( key == "nets" )
    {
      expect( 2u );
      declared_nets = static_cast<std::uint32_t>( detail::parse_uint( tokens[1], where ) );
      nl->reserve_nets( declared_nets );
    }
    else if ( key == "input" )
    {
      expect( 3u );
      nl->add_input( std::string( tokens[1] ), net( tokens[2], where ) );
    }
    else if ( key == "output" )
    {
      expect( 3u );
      nl->add_output( std::string( tokens[1] ), net( tokens[2], where ) );
    }
    else if ( key == "tie" )
    {
      expect( 3u );
      if ( tokens[2] != "0" && tokens[2] != "1" )
        throw error( error_kind::parse_error, where + ": tie value must be 0 or 1" );
      nl->add_tie( net( tokens[1], where ), tokens[2] == "1" );
    }
    else if ( key == "gate" )
    {
      if ( tokens.size() < 4u )
        throw error( error_kind::parse_error, where + ": malformed gate record" );
      auto const id = detail::parse_uint( tokens[1], where );
      if ( id != nl->num_gates() )
        throw error( error_kind::parse_error, where + ": gate ids must be dense and in order" );
      std::vector<net_id> ins, outs;
      bool after_colon = false;
      for ( auto t = 3u; t < tokens.size(); ++t )
      {
        if ( tokens[t] == ":" )
        {
          if ( after_colon )
            throw error( error_kind::parse_error, where + ": duplicate ':'" );
          after_colon = true;
          continue;
        }
        ( after_colon ? outs : ins ).push_back( net( tokens[t], where ) );
      }
      if ( !after_colon )
        throw error( error_kind::parse_error, where + ": gate record needs ':' before outputs" );
      nl->add_gate( std::string( tokens[2] ), std::move( ins ), std::move( outs ) );
    }
    else
    {
      throw error( error_kind::parse_error, where + ": unknown record '" + std::string( key ) + "'" );
    }
  }
  if ( !nl )
    throw error( error_kind::parse_error, source + ": empty or headerless netlist" );
  return std::move( *nl );
}

} // namespace adderlab
