/*!
  \file cell_model.hpp
  \brief Standard-cell technology model: logic functions, delay, area and
         switching energy of each cell, plus the text format libraries are
         stored in.

  Cell library file format (one record per line, `#` starts a comment):

      cell <name> pins=<p0,p1,...> area=<units> energy_fj=<fJ> out=<pin>:<delay_ps>:<truthtable> [out=...]

  A truth table is a binary string of length 2^pins listing the output for
  the most significant input index first. Input pin 0 is the least
  significant bit of the index, so for `AND2` the table is `1000`.
*/

#pragma once

#include "error.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace adderlab
{

constexpr std::uint32_t max_cell_inputs = 5u;

struct cell_output
{
  std::string pin;
  double delay_ps{};
  /* bit i holds the output value at input index i */
  std::uint32_t truth_table{};

  bool operator==( cell_output const& ) const = default;
};

struct cell_spec
{
  std::string name;
  std::vector<std::string> input_pins;
  std::vector<cell_output> outputs;
  double area{};
  double switch_energy_fj{};

  std::uint32_t num_inputs() const
  {
    return static_cast<std::uint32_t>( input_pins.size() );
  }

  std::uint32_t num_outputs() const
  {
    return static_cast<std::uint32_t>( outputs.size() );
  }

  bool operator==( cell_spec const& ) const = default;
};

/*! \brief Checks the per-cell invariants, throws `invalid_spec`. */
inline void check_cell( cell_spec const& cell )
{
  auto const fail = [&]( std::string const& what ) {
    throw error( error_kind::invalid_spec, "cell " + cell.name + ": " + what );
  };
  if ( cell.name.empty() )
    fail( "empty name" );
  if ( cell.input_pins.empty() || cell.input_pins.size() > max_cell_inputs )
    fail( "needs 1 to " + std::to_string( max_cell_inputs ) + " input pins" );
  if ( cell.outputs.empty() )
    fail( "no outputs" );
  if ( !( cell.area > 0.0 ) )
    fail( "area must be positive" );
  if ( !( cell.switch_energy_fj >= 0.0 ) )
    fail( "switching energy must be non-negative" );
  auto const rows = 1u << cell.num_inputs();
  for ( auto const& out : cell.outputs )
  {
    if ( !( out.delay_ps > 0.0 ) )
      fail( "output " + out.pin + " delay must be positive" );
    if ( rows < 32u && ( out.truth_table >> rows ) != 0u )
      fail( "output " + out.pin + " truth table wider than 2^pins" );
  }
}

/*! \brief Output `out` of `cell` at the packed input index. */
inline bool eval_output( cell_spec const& cell, std::uint32_t out, std::uint32_t input_index )
{
  return ( cell.outputs[out].truth_table >> input_index ) & 1u;
}

/*! \brief Evaluates every output of `cell`; `inputs[0]` is pin 0. */
inline std::vector<bool> eval_cell( cell_spec const& cell, std::vector<bool> const& inputs )
{
  if ( inputs.size() != cell.input_pins.size() )
  {
    throw error( error_kind::arity_mismatch, "cell " + cell.name + " expects " + std::to_string( cell.input_pins.size() ) +
                                                 " inputs, got " + std::to_string( inputs.size() ) );
  }
  std::uint32_t index = 0u;
  for ( auto i = 0u; i < inputs.size(); ++i )
  {
    index |= static_cast<std::uint32_t>( inputs[i] ) << i;
  }
  std::vector<bool> result( cell.outputs.size() );
  for ( auto o = 0u; o < cell.outputs.size(); ++o )
  {
    result[o] = eval_output( cell, o, index );
  }
  return result;
}

class cell_library
{
public:
  using container = std::map<std::string, cell_spec, std::less<>>;

  explicit cell_library( std::string source = "default" ) : source_( std::move( source ) ) {}

  void add( cell_spec cell )
  {
    check_cell( cell );
    auto name = cell.name;
    if ( !cells_.emplace( name, std::move( cell ) ).second )
    {
      throw error( error_kind::duplicate_cell, "cell " + name + " defined more than once" );
    }
  }

  cell_spec const* find( std::string_view name ) const
  {
    auto const it = cells_.find( name );
    return it == cells_.end() ? nullptr : &it->second;
  }

  cell_spec const& at( std::string_view name ) const
  {
    if ( auto const* cell = find( name ) )
      return *cell;
    throw error( error_kind::unknown_cell, "no cell named " + std::string( name ) );
  }

  bool contains( std::string_view name ) const
  {
    return find( name ) != nullptr;
  }

  std::size_t size() const
  {
    return cells_.size();
  }

  auto begin() const
  {
    return cells_.begin();
  }

  auto end() const
  {
    return cells_.end();
  }

  std::string const& source() const
  {
    return source_;
  }

private:
  container cells_;
  std::string source_;
};

/* cells every default generator relies on */
inline std::vector<std::string> const& required_cell_names()
{
  static std::vector<std::string> const names{ "INV", "NAND2", "NOR2", "AND2", "AND3", "AND4", "OR2",
                                               "OR3", "XOR2", "XOR3", "AO21", "MUX2", "FA", "DBFA" };
  return names;
}

/* identical to data/default_cells.lib */
inline constexpr std::string_view default_library_text =
    "# adderlab cell library, format version 1\n"
    "# cell <name> pins=<p0,p1,..> area=<units> energy_fj=<fJ per output transition> out=<pin>:<delay_ps>:<truth table> ...\n"
    "# Truth tables list the most significant input index first; pin 0 is the least significant index bit.\n"
    "\n"
    "cell INV pins=a area=1.0 energy_fj=0.5 out=y:10:01\n"
    "cell NAND2 pins=a,b area=1.2 energy_fj=0.7 out=y:12:0111\n"
    "cell NOR2 pins=a,b area=1.2 energy_fj=0.7 out=y:14:0001\n"
    "cell AND2 pins=a,b area=1.5 energy_fj=0.9 out=y:16:1000\n"
    "cell AND3 pins=a,b,c area=2.0 energy_fj=1.2 out=y:20:10000000\n"
    "cell AND4 pins=a,b,c,d area=2.5 energy_fj=1.5 out=y:24:1000000000000000\n"
    "cell OR2 pins=a,b area=1.5 energy_fj=0.9 out=y:16:1110\n"
    "cell OR3 pins=a,b,c area=2.0 energy_fj=1.2 out=y:20:11111110\n"
    "cell XOR2 pins=a,b area=2.5 energy_fj=1.6 out=y:30:0110\n"
    "cell XOR3 pins=a,b,c area=4.0 energy_fj=2.8 out=y:55:10010110\n"
    "cell AO21 pins=a1,a2,b area=2.0 energy_fj=1.2 out=y:22:11111000\n"
    "cell MUX2 pins=d0,d1,s area=2.2 energy_fj=1.3 out=y:25:11001010\n"
    "cell FA pins=a,b,ci area=6.0 energy_fj=4.0 out=s:60:10010110 out=co:45:11101000\n"
    "cell DBFA pins=a0,b0,a1,b1,ci area=11.0 energy_fj=7.5 out=s0:65:10011001100110010110011001100110 "
    "out=s1:75:11100001000111101000011101111000 out=co:60:11111110111000001111100010000000\n";

namespace detail
{

inline std::vector<std::string_view> split( std::string_view text, char sep )
{
  std::vector<std::string_view> parts;
  std::size_t start = 0u;
  while ( true )
  {
    auto const pos = text.find( sep, start );
    parts.push_back( text.substr( start, pos - start ) );
    if ( pos == std::string_view::npos )
      break;
    start = pos + 1u;
  }
  return parts;
}

inline double parse_double( std::string_view text, std::string const& where )
{
  double value{};
  auto const [ptr, ec] = std::from_chars( text.data(), text.data() + text.size(), value );
  if ( ec != std::errc{} || ptr != text.data() + text.size() || text.empty() )
  {
    throw error( error_kind::parse_error, where + ": bad number '" + std::string( text ) + "'" );
  }
  return value;
}

inline std::uint64_t parse_uint( std::string_view text, std::string const& where )
{
  std::uint64_t value{};
  auto const [ptr, ec] = std::from_chars( text.data(), text.data() + text.size(), value );
  if ( ec != std::errc{} || ptr != text.data() + text.size() || text.empty() )
  {
    throw error( error_kind::parse_error, where + ": bad integer '" + std::string( text ) + "'" );
  }
  return value;
}

inline std::vector<std::string_view> tokenize( std::string_view line )
{
  std::vector<std::string_view> tokens;
  std::size_t i = 0u;
  while ( i < line.size() )
  {
    while ( i < line.size() && ( line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ) )
      ++i;
    auto const start = i;
    while ( i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' )
      ++i;
    if ( i > start )
      tokens.push_back( line.substr( start, i - start ) );
  }
  return tokens;
}

inline std::string_view strip_comment( std::string_view line )
{
  return line.substr( 0u, line.find( '#' ) );
}

} // namespace detail

/*! \brief Parses one `cell ...` record. Arity and truth-table length
 *  mismatches are reported as `invalid_spec`, syntax problems as
 *  `parse_error`. */
inline cell_spec parse_cell_record( std::string_view line, std::string const& where )
{
  auto const tokens = detail::tokenize( line );
  if ( tokens.size() < 2u || tokens[0] != "cell" )
  {
    throw error( error_kind::parse_error, where + ": expected 'cell <name> ...'" );
  }
  cell_spec cell;
  cell.name = tokens[1];
  bool has_pins = false, has_area = false, has_energy = false;
  std::vector<std::pair<std::string_view, std::string_view>> raw_outputs;

  for ( auto t = 2u; t < tokens.size(); ++t )
  {
    auto const eq = tokens[t].find( '=' );
    if ( eq == std::string_view::npos )
    {
      throw error( error_kind::parse_error, where + ": expected key=value, got '" + std::string( tokens[t] ) + "'" );
    }
    auto const key = tokens[t].substr( 0u, eq );
    auto const value = tokens[t].substr( eq + 1u );
    if ( key == "pins" )
    {
      for ( auto pin : detail::split( value, ',' ) )
      {
        if ( pin.empty() )
          throw error( error_kind::parse_error, where + ": empty pin name" );
        cell.input_pins.emplace_back( pin );
      }
      has_pins = true;
    }
    else if ( key == "area" )
    {
      cell.area = detail::parse_double( value, where );
      has_area = true;
    }
    else if ( key == "energy_fj" )
    {
      cell.switch_energy_fj = detail::parse_double( value, where );
      has_energy = true;
    }
    else if ( key == "out" )
    {
      raw_outputs.emplace_back( key, value );
    }
    else
    {
      throw error( error_kind::parse_error, where + ": unknown field '" + std::string( key ) + "'" );
    }
  }
  if ( !has_pins || !has_area || !has_energy || raw_outputs.empty() )
  {
    throw error( error_kind::parse_error, where + ": cell " + cell.name + " needs pins, area, energy_fj and out" );
  }
  if ( cell.input_pins.size() > max_cell_inputs )
  {
    throw error( error_kind::invalid_spec, where + ": cell " + cell.name + " has too many pins" );
  }

  auto const rows = std::size_t{ 1u } << cell.input_pins.size();
  for ( auto const& [_, value] : raw_outputs )
  {
    auto const fields = detail::split( value, ':' );
    if ( fields.size() != 3u || fields[0].empty() )
    {
      throw error( error_kind::parse_error, where + ": output must be pin:delay_ps:truthtable" );
    }
    cell_output out;
    out.pin = fields[0];
    out.delay_ps = detail::parse_double( fields[1], where );
    auto const table = fields[2];
    if ( table.size() != rows )
    {
      throw error( error_kind::invalid_spec, where + ": cell " + cell.name + " output " + out.pin + " truth table has length " +
                                                 std::to_string( table.size() ) + ", expected " + std::to_string( rows ) );
    }
    for ( auto j = 0u; j < table.size(); ++j )
    {
      auto const index = rows - 1u - j;
      if ( table[j] == '1' )
        out.truth_table |= 1u << index;
      else if ( table[j] != '0' )
        throw error( error_kind::parse_error, where + ": truth table must be binary" );
    }
    cell.outputs.push_back( std::move( out ) );
  }
  check_cell( cell );
  return cell;
}

inline cell_library parse_cell_library( std::istream& in, std::string source )
{
  cell_library lib( source );
  std::string line;
  std::size_t line_no = 0u;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    auto const body = detail::strip_comment( line );
    if ( detail::tokenize( body ).empty() )
      continue;
    auto const where = source + ":" + std::to_string( line_no );
    auto cell = parse_cell_record( body, where );
    try
    {
      lib.add( std::move( cell ) );
    }
    catch ( error const& e )
    {
      throw error( e.kind(), where + ": " + e.message() );
    }
  }
  if ( lib.size() == 0u )
  {
    throw error( error_kind::parse_error, source + ": no cells defined" );
  }
  return lib;
}

inline cell_library default_cell_library()
{
  std::istringstream in{ std::string( default_library_text ) };
  return parse_cell_library( in, "default" );
}

/*! \brief Loads a library file, or the built-in default when no path is given. */
inline cell_library load_cell_library( std::optional<std::filesystem::path> const& path = std::nullopt )
{
  if ( !path )
    return default_cell_library();
  std::ifstream in( *path );
  if ( !in )
  {
    throw error( error_kind::io_error, "cannot open cell library " + path->string() );
  }
  return parse_cell_library( in, path->string() );
}

inline std::string format_truth_table( cell_output const& out, std::uint32_t num_inputs )
{
  auto const rows = 1u << num_inputs;
  std::string text( rows, '0' );
  for ( auto j = 0u; j < rows; ++j )
  {
    if ( ( out.truth_table >> ( rows - 1u - j ) ) & 1u )
      text[j] = '1';
  }
  return text;
}

} // namespace adderlab
