/*!
  \file simulation.hpp
  \brief Levelized zero-delay simulation, adder reference checks and
         toggle counting over reproducible random vector streams.

  Vector stream: SplitMix64 with state `seed + (3i + j + 1) * 0x9e3779b97f4a7c15`
  produces word j of vector i. Word 0 masked to the adder width is `a`,
  word 1 is `b`, and bit 63 of word 2 is `cin`. With seed 0 the first three
  words are 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4 and 0x06c45d188009454f.
*/

#pragma once

#include "cell_model.hpp"
#include "error.hpp"
#include "netlist.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace adderlab
{

/*! \brief Gate list flattened into evaluation order with truth tables bound. */
class compiled_netlist
{
public:
  struct gate_op
  {
    std::uint32_t gate;
    std::uint32_t first_input, num_inputs;
    std::uint32_t first_output, num_outputs;
  };

  compiled_netlist( netlist const& nl, cell_library const& lib ) : netlist_( nl ), schedule_( ( require_valid( nl, lib ), levelize( nl ) ) )
  {
    for ( auto g : schedule_.order() )
    {
      auto const& gate = nl.gate( g );
      auto const& cell = lib.at( gate.cell );
      gate_op op{ g, static_cast<std::uint32_t>( inputs_.size() ), cell.num_inputs(),
                  static_cast<std::uint32_t>( outputs_.size() ), cell.num_outputs() };
      for ( auto n : gate.inputs )
        inputs_.push_back( to_index( n ) );
      for ( auto o = 0u; o < cell.num_outputs(); ++o )
      {
        outputs_.push_back( to_index( gate.outputs[o] ) );
        tables_.push_back( cell.outputs[o].truth_table );
      }
      ops_.push_back( op );
    }
    for ( auto const& p : nl.inputs() )
      input_nets_.push_back( to_index( p.net ) );
    for ( auto const& p : nl.outputs() )
      output_nets_.push_back( to_index( p.net ) );
    if ( nl.width() > 0u && nl.find_input( "cin" ) && nl.find_output( "cout" ) )
      adder_ = resolve_adder_ports( nl );
  }

  netlist const& source() const
  {
    return netlist_;
  }

  schedule const& levels() const
  {
    return schedule_;
  }

  std::vector<gate_op> const& ops() const
  {
    return ops_;
  }

  std::uint32_t output_net( gate_op const& op, std::uint32_t o ) const
  {
    return outputs_[op.first_output + o];
  }

  bool is_adder() const
  {
    return adder_.has_value();
  }

  adder_ports const& ports() const
  {
    if ( !adder_ )
      throw error( error_kind::invalid_netlist, "netlist does not expose adder ports" );
    return *adder_;
  }

  std::vector<std::uint8_t> initial_values() const
  {
    std::vector<std::uint8_t> values( netlist_.num_nets(), 0u );
    for ( auto const& t : netlist_.ties() )
      values[to_index( t.net )] = t.value ? 1u : 0u;
    return values;
  }

  /*! \brief Settles every gate output; port and tie nets must already be set. */
  void evaluate( std::vector<std::uint8_t>& values ) const
  {
    for ( auto const& op : ops_ )
    {
      std::uint32_t index = 0u;
      for ( auto i = 0u; i < op.num_inputs; ++i )
        index |= static_cast<std::uint32_t>( values[inputs_[op.first_input + i]] ) << i;
      for ( auto o = 0u; o < op.num_outputs; ++o )
        values[outputs_[op.first_output + o]] = static_cast<std::uint8_t>( ( tables_[op.first_output + o] >> index ) & 1u );
    }
  }

  /*! \brief Generic evaluation: input bits in port order to output bits in port order. */
  std::vector<bool> evaluate( std::vector<bool> const& inputs ) const
  {
    if ( inputs.size() != input_nets_.size() )
      throw error( error_kind::arity_mismatch, "expected " + std::to_string( input_nets_.size() ) + " input bits" );
    auto values = initial_values();
    for ( auto i = 0u; i < inputs.size(); ++i )
      values[input_nets_[i]] = inputs[i] ? 1u : 0u;
    evaluate( values );
    std::vector<bool> out( output_nets_.size() );
    for ( auto i = 0u; i < out.size(); ++i )
      out[i] = values[output_nets_[i]] != 0u;
    return out;
  }

private:
  netlist netlist_;
  schedule schedule_;
  std::vector<gate_op> ops_;
  std::vector<std::uint32_t> inputs_, outputs_, tables_;
  std::vector<std::uint32_t> input_nets_, output_nets_;
  std::optional<adder_ports> adder_;
};

struct input_vector
{
  std::uint64_t a{};
  std::uint64_t b{};
  bool cin{};

  bool operator==( input_vector const& ) const = default;
};

struct sim_result
{
  std::uint64_t sum{};
  bool cout{};
  std::vector<std::uint8_t> net_values;
};

inline std::uint64_t width_mask( std::uint32_t width )
{
  return width >= 64u ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << width ) - 1u;
}

inline void apply_vector( adder_ports const& ports, input_vector const& v, std::vector<std::uint8_t>& values )
{
  for ( auto i = 0u; i < ports.width; ++i )
  {
    values[to_index( ports.a[i] )] = static_cast<std::uint8_t>( ( v.a >> i ) & 1u );
    values[to_index( ports.b[i] )] = static_cast<std::uint8_t>( ( v.b >> i ) & 1u );
  }
  values[to_index( ports.cin )] = v.cin ? 1u : 0u;
}

inline std::pair<std::uint64_t, bool> read_outputs( adder_ports const& ports, std::vector<std::uint8_t> const& values )
{
  std::uint64_t sum = 0u;
  for ( auto i = 0u; i < ports.width; ++i )
    sum |= static_cast<std::uint64_t>( values[to_index( ports.sum[i] )] ) << i;
  return { sum, values[to_index( ports.cout )] != 0u };
}

inline sim_result simulate( compiled_netlist const& cn, input_vector const& v )
{
  auto const& ports = cn.ports();
  auto const mask = width_mask( ports.width );
  if ( ( v.a & ~mask ) != 0u || ( v.b & ~mask ) != 0u )
  {
    throw error( error_kind::width_overflow, "operand exceeds " + std::to_string( ports.width ) + " bits" );
  }
  sim_result r;
  r.net_values = cn.initial_values();
  apply_vector( ports, v, r.net_values );
  cn.evaluate( r.net_values );
  std::tie( r.sum, r.cout ) = read_outputs( ports, r.net_values );
  return r;
}

inline sim_result simulate( netlist const& nl, cell_library const& lib, input_vector const& v )
{
  return simulate( compiled_netlist( nl, lib ), v );
}

/* Vector streams */

inline std::uint64_t splitmix64( std::uint64_t state )
{
  auto z = state;
  z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebull;
  return z ^ ( z >> 31 );
}

/*! \brief Counter-based random vector stream; vector i is computable directly. */
class vector_stream
{
public:
  static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ull;

  vector_stream( std::uint64_t seed, std::uint32_t width ) : seed_( seed ), mask_( width_mask( width ) ) {}

  std::uint64_t word( std::uint64_t index ) const
  {
    return splitmix64( seed_ + ( index + 1u ) * gamma );
  }

  input_vector operator()( std::uint64_t i ) const
  {
    return { word( 3u * i ) & mask_, word( 3u * i + 1u ) & mask_, ( word( 3u * i + 2u ) >> 63 ) != 0u };
  }

  std::uint64_t seed() const
  {
    return seed_;
  }

private:
  std::uint64_t seed_;
  std::uint64_t mask_;
};

/* Reference checking */

struct mismatch
{
  input_vector vector;
  std::uint64_t expected_sum{}, actual_sum{};
  bool expected_cout{}, actual_cout{};
};

/*! \brief Wide-integer reference sum: {low `width` bits, carry out}. */
inline std::pair<std::uint64_t, bool> reference_add( input_vector const& v, std::uint32_t width )
{
  auto const total = static_cast<unsigned __int128>( v.a ) + v.b + ( v.cin ? 1u : 0u );
  return { static_cast<std::uint64_t>( total ) & width_mask( width ), ( ( total >> width ) & 1u ) != 0u };
}

inline std::optional<mismatch> check_vector( compiled_netlist const& cn, input_vector const& v,
                                             std::vector<std::uint8_t>& values )
{
  auto const& ports = cn.ports();
  apply_vector( ports, v, values );
  cn.evaluate( values );
  auto const [sum, cout] = read_outputs( ports, values );
  auto const [ref_sum, ref_cout] = reference_add( v, ports.width );
  if ( sum != ref_sum || cout != ref_cout )
    return mismatch{ v, ref_sum, sum, ref_cout, cout };
  return std::nullopt;
}

/*! \brief All 2^(2w+1) input combinations; widths above 12 are refused. */
inline std::optional<mismatch> verify_exhaustive( compiled_netlist const& cn )
{
  auto const w = cn.ports().width;
  if ( w > 12u )
    throw error( error_kind::invalid_params, "exhaustive check limited to width 12" );
  auto values = cn.initial_values();
  auto const n = std::uint64_t{ 1 } << w;
  for ( std::uint64_t a = 0u; a < n; ++a )
    for ( std::uint64_t b = 0u; b < n; ++b )
      for ( auto cin : { false, true } )
        if ( auto m = check_vector( cn, { a, b, cin }, values ) )
          return m;
  return std::nullopt;
}

inline std::optional<mismatch> verify_random( compiled_netlist const& cn, std::uint64_t n_vectors, std::uint64_t seed )
{
  vector_stream stream( seed, cn.ports().width );
  auto values = cn.initial_values();
  for ( std::uint64_t i = 0u; i < n_vectors; ++i )
    if ( auto m = check_vector( cn, stream( i ), values ) )
      return m;
  return std::nullopt;
}

/* Toggle counting */

struct gate_toggles
{
  std::uint32_t gate{};
  std::string cell;
  /* one count per cell output */
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const
  {
    std::uint64_t t = 0u;
    for ( auto c : counts )
      t += c;
    return t;
  }

  bool operator==( gate_toggles const& ) const = default;
};

struct toggle_stats
{
  /* indexed by gate id */
  std::vector<gate_toggles> gates;
  std::uint64_t vectors_applied{};
  std::uint64_t seed{};

  std::uint64_t total() const
  {
    std::uint64_t t = 0u;
    for ( auto const& g : gates )
      t += g.total();
    return t;
  }

  bool operator==( toggle_stats const& ) const = default;
};

using vector_source = std::function<input_vector( std::uint64_t )>;

namespace detail
{

/* counts toggles over vectors [begin, end); vector begin-1 (if any) seeds the previous state */
inline std::vector<std::uint64_t> count_toggles( compiled_netlist const& cn, vector_source const& source, std::uint64_t begin,
                                                 std::uint64_t end )
{
  auto const& ports = cn.ports();
  auto const& ops = cn.ops();
  std::vector<std::uint64_t> counts( cn.source().num_nets(), 0u );
  auto values = cn.initial_values();
  auto previous = values;

  auto start = begin;
  if ( begin > 0u )
    start = begin - 1u;
  for ( auto i = start; i < end; ++i )
  {
    apply_vector( ports, source( i ), values );
    cn.evaluate( values );
    if ( i >= begin && i > 0u )
    {
      for ( auto const& op : ops )
        for ( auto o = 0u; o < op.num_outputs; ++o )
        {
          auto const net = cn.output_net( op, o );
          counts[net] += values[net] != previous[net] ? 1u : 0u;
        }
    }
    std::swap( values, previous );
  }
  return counts;
}

} // namespace detail

/*! \brief Applies `n_vectors` vectors from `source` and counts, per gate
 *  output, how often the settled value differs from the previous vector's.
 *
 *  The stream may be split over `workers` threads; each worker replays the
 *  vector just before its slice so merged counts equal a single-threaded run.
 */
inline toggle_stats run_vectors( compiled_netlist const& cn, vector_source const& source, std::uint64_t n_vectors,
                                 std::uint64_t seed, double period_ns, unsigned workers = 1u )
{
  if ( n_vectors < 2u )
    throw error( error_kind::invalid_params, "need at least 2 vectors" );
  if ( !( period_ns > 0.0 ) )
    throw error( error_kind::invalid_params, "period must be positive" );
  if ( workers == 0u )
    workers = 1u;
  if ( workers > n_vectors )
    workers = static_cast<unsigned>( n_vectors );

  std::vector<std::vector<std::uint64_t>> partial( workers );
  if ( workers == 1u )
  {
    partial[0] = detail::count_toggles( cn, source, 0u, n_vectors );
  }
  else
  {
    std::vector<std::jthread> threads;
    for ( auto w = 0u; w < workers; ++w )
    {
      auto const begin = n_vectors * w / workers;
      auto const end = n_vectors * ( w + 1u ) / workers;
      threads.emplace_back( [&, w, begin, end] { partial[w] = detail::count_toggles( cn, source, begin, end ); } );
    }
  }

  toggle_stats stats;
  stats.vectors_applied = n_vectors;
  stats.seed = seed;
  auto const& nl = cn.source();
  stats.gates.resize( nl.num_gates() );
  for ( auto const& g : nl.gates() )
  {
    auto& gt = stats.gates[g.id];
    gt.gate = g.id;
    gt.cell = g.cell;
    for ( auto o : g.outputs )
    {
      std::uint64_t c = 0u;
      for ( auto const& p : partial )
        c += p[to_index( o )];
      gt.counts.push_back( c );
    }
  }
  return stats;
}

inline toggle_stats run_vectors( compiled_netlist const& cn, std::uint64_t n_vectors, std::uint64_t seed, double period_ns,
                                 unsigned workers = 1u )
{
  vector_stream const stream( seed, cn.ports().width );
  return run_vectors( cn, vector_source( stream ), n_vectors, seed, period_ns, workers );
}

/*! \brief Per-gate toggle dump: `gate,cell,toggles`. */
inline void write_toggle_csv( std::ostream& os, toggle_stats const& stats )
{
  os << "gate,cell,toggles\n";
  for ( auto const& g : stats.gates )
    os << g.gate << "," << g.cell << "," << g.total() << "\n";
}

} // namespace adderlab
