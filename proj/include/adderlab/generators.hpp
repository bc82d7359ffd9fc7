/*!
  \file generators.hpp
  \brief Parametric gate-level constructors for ripple-carry, carry-select
         and carry-lookahead adder families.

  All generators allocate ports first (`a[0..w)`, `b[0..w)`, `cin`) and
  then gates in LSB-to-MSB order, so the resulting ids are reproducible.
  Partitions are stored least significant group first.
*/

#pragma once

#include "error.hpp"
#include "netlist.hpp"

#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adderlab
{

enum class architecture
{
  rca_fa,
  rca_dbfa,
  rcla,
  rcla_rca,
  bcla,
  bcla_rca,
  csla,
  csla_bec
};

inline std::vector<architecture> const& all_architectures()
{
  static std::vector<architecture> const archs{ architecture::rca_fa, architecture::rca_dbfa, architecture::rcla,
                                                architecture::rcla_rca, architecture::bcla, architecture::bcla_rca,
                                                architecture::csla, architecture::csla_bec };
  return archs;
}

inline std::string_view to_string( architecture arch )
{
  switch ( arch )
  {
  case architecture::rca_fa: return "RCA_FA";
  case architecture::rca_dbfa: return "RCA_DBFA";
  case architecture::rcla: return "RCLA";
  case architecture::rcla_rca: return "RCLA_RCA";
  case architecture::bcla: return "BCLA";
  case architecture::bcla_rca: return "BCLA_RCA";
  case architecture::csla: return "CSLA";
  case architecture::csla_bec: return "CSLA_BEC";
  }
  return "?";
}

inline architecture parse_architecture( std::string_view name )
{
  for ( auto arch : all_architectures() )
    if ( to_string( arch ) == name )
      return arch;
  throw error( error_kind::parse_error, "unknown architecture '" + std::string( name ) + "'" );
}

/*! \brief Full adders as the compound library cell, or as five primitive gates. */
enum class fa_style
{
  cell,
  gates
};

inline std::string_view to_string( fa_style style )
{
  return style == fa_style::cell ? "cell" : "gates";
}

inline fa_style parse_fa_style( std::string_view name )
{
  if ( name == "cell" )
    return fa_style::cell;
  if ( name == "gates" )
    return fa_style::gates;
  throw error( error_kind::parse_error, "unknown full-adder style '" + std::string( name ) + "'" );
}

struct gp_pair
{
  net_id g{};
  net_id p{};
};

/*! \brief Prefix generate/propagate nets: `generate[j]` is G_{j:0}. */
struct block_prefix
{
  std::vector<net_id> generate;
  std::vector<net_id> propagate;

  net_id block_generate() const
  {
    return generate.back();
  }

  net_id block_propagate() const
  {
    return propagate.back();
  }
};

struct ripple_result
{
  std::vector<net_id> sum;
  net_id carry{};
};

namespace detail
{

struct adder_builder
{
  netlist nl;
  std::vector<net_id> a, b;
  net_id cin{};

  explicit adder_builder( std::uint32_t width ) : nl( width )
  {
    for ( auto i = 0u; i < width; ++i )
      a.push_back( nl.add_input( bus_name( "a", i ) ) );
    for ( auto i = 0u; i < width; ++i )
      b.push_back( nl.add_input( bus_name( "b", i ) ) );
    cin = nl.add_input( "cin" );
  }

  netlist finish( std::span<net_id const> sum, net_id cout ) &&
  {
    for ( auto i = 0u; i < sum.size(); ++i )
      nl.add_output( bus_name( "sum", i ), sum[i] );
    nl.add_output( "cout", cout );
    return std::move( nl );
  }
};

inline void check_width( std::uint32_t width )
{
  if ( width < 1u || width > 64u )
    throw error( error_kind::invalid_width, "width must be in [1, 64], got " + std::to_string( width ) );
}

inline void check_partition( std::span<std::uint32_t const> partition, std::uint32_t expected, std::string_view what )
{
  for ( auto k : partition )
    if ( k == 0u )
      throw error( error_kind::invalid_partition, std::string( what ) + " partition contains a zero-size group" );
  auto const total = std::accumulate( partition.begin(), partition.end(), 0u );
  if ( total != expected )
  {
    throw error( error_kind::partition_mismatch, std::string( what ) + " partition sums to " + std::to_string( total ) +
                                                     ", expected " + std::to_string( expected ) );
  }
}

} // namespace detail

/*! \brief One full adder; returns {sum, carry-out}. */
inline std::pair<net_id, net_id> full_adder( netlist& nl, net_id a, net_id b, net_id c, fa_style style )
{
  if ( style == fa_style::cell )
  {
    auto const outs = nl.add_gate( "FA", { a, b, c }, 2u );
    return { outs[0], outs[1] };
  }
  auto const p = nl.add_gate1( "XOR2", { a, b } );
  auto const g = nl.add_gate1( "AND2", { a, b } );
  auto const s = nl.add_gate1( "XOR2", { p, c } );
  auto const t = nl.add_gate1( "AND2", { p, c } );
  auto const co = nl.add_gate1( "OR2", { g, t } );
  return { s, co };
}

/*! \brief Dual-bit full adder over bit pairs (a0,b0), (a1,b1).
 *  Returns {sum0, sum1, carry-out}. The gate form computes the carry-out
 *  directly from generate/propagate so it does not wait for the middle carry. */
inline std::array<net_id, 3> dual_bit_full_adder( netlist& nl, net_id a0, net_id b0, net_id a1, net_id b1, net_id c, fa_style style )
{
  if ( style == fa_style::cell )
  {
    auto const outs = nl.add_gate( "DBFA", { a0, b0, a1, b1, c }, 3u );
    return { outs[0], outs[1], outs[2] };
  }
  auto const p0 = nl.add_gate1( "XOR2", { a0, b0 } );
  auto const g0 = nl.add_gate1( "AND2", { a0, b0 } );
  auto const p1 = nl.add_gate1( "XOR2", { a1, b1 } );
  auto const g1 = nl.add_gate1( "AND2", { a1, b1 } );
  auto const s0 = nl.add_gate1( "XOR2", { p0, c } );
  auto const c1 = nl.add_gate1( "AO21", { p0, c, g0 } );
  auto const s1 = nl.add_gate1( "XOR2", { p1, c1 } );
  auto const t1 = nl.add_gate1( "AND2", { p1, g0 } );
  auto const t2 = nl.add_gate1( "AND3", { p1, p0, c } );
  auto const co = nl.add_gate1( "OR3", { g1, t1, t2 } );
  return { s0, s1, co };
}

/*! \brief Ripple-carry chain of full adders over equally sized bit slices. */
inline ripple_result ripple_chain( netlist& nl, std::span<net_id const> a, std::span<net_id const> b, net_id carry, fa_style style )
{
  ripple_result r;
  for ( auto i = 0u; i < a.size(); ++i )
  {
    auto const [s, co] = full_adder( nl, a[i], b[i], carry, style );
    r.sum.push_back( s );
    carry = co;
  }
  r.carry = carry;
  return r;
}

/*! \brief Per-bit generate (AND2) and propagate (XOR2) gates. */
inline std::vector<gp_pair> pg_logic( netlist& nl, std::span<net_id const> a, std::span<net_id const> b )
{
  std::vector<gp_pair> gp;
  for ( auto i = 0u; i < a.size(); ++i )
  {
    auto const p = nl.add_gate1( "XOR2", { a[i], b[i] } );
    auto const g = nl.add_gate1( "AND2", { a[i], b[i] } );
    gp.push_back( { g, p } );
  }
  return gp;
}

/*! \brief Prefix generate/propagate chains of a block.
 *
 *  G_{0:0} = g_0, P_{0:0} = p_0, G_{j:0} = g_j + p_j G_{j-1:0} (AO21) and
 *  P_{j:0} = p_j P_{j-1:0} (AND2). None of the emitted gates depends on the
 *  block's carry input.
 */
inline block_prefix block_gp( netlist& nl, std::span<gp_pair const> gp )
{
  if ( gp.empty() )
    throw error( error_kind::empty_block, "block_gp needs at least one (g, p) pair" );
  block_prefix prefix;
  prefix.generate.push_back( gp[0].g );
  prefix.propagate.push_back( gp[0].p );
  for ( auto j = 1u; j < gp.size(); ++j )
  {
    prefix.generate.push_back( nl.add_gate1( "AO21", { gp[j].p, prefix.generate.back(), gp[j].g } ) );
    prefix.propagate.push_back( nl.add_gate1( "AND2", { gp[j].p, prefix.propagate.back() } ) );
  }
  return prefix;
}

/*! \brief (k)-bit binary to excess-1 converter: y = (x + 1) mod 2^k. */
inline std::vector<net_id> bec_logic( netlist& nl, std::span<net_id const> x )
{
  if ( x.size() < 2u )
    throw error( error_kind::invalid_width, "BEC needs at least 2 bits" );
  std::vector<net_id> y;
  y.push_back( nl.add_gate1( "INV", { x[0] } ) );
  auto chain = x[0];
  for ( auto i = 1u; i < x.size(); ++i )
  {
    if ( i >= 2u )
      chain = nl.add_gate1( "AND2", { chain, x[i - 1u] } );
    y.push_back( nl.add_gate1( "XOR2", { x[i], chain } ) );
  }
  return y;
}

/*! \brief Sub-RCLA group: PG logic, recursive lookahead generator with one
 *  AO21 per carry, and XOR2 sum logic. */
inline ripple_result rcla_group( netlist& nl, std::span<net_id const> a, std::span<net_id const> b, net_id carry_in )
{
  auto const gp = pg_logic( nl, a, b );
  auto const prefix = block_gp( nl, gp );
  std::vector<net_id> carries{ carry_in };
  for ( auto j = 0u; j < gp.size(); ++j )
  {
    carries.push_back( nl.add_gate1( "AO21", { prefix.propagate[j], carry_in, prefix.generate[j] } ) );
  }
  ripple_result r;
  for ( auto i = 0u; i < gp.size(); ++i )
    r.sum.push_back( nl.add_gate1( "XOR2", { gp[i].p, carries[i] } ) );
  r.carry = carries.back();
  return r;
}

/*! \brief Sub-BCLA group: a single lookahead carry-out from the block
 *  generator; sums ripple through M-1 full adders and a top XOR3. */
inline ripple_result bcla_group( netlist& nl, std::span<net_id const> a, std::span<net_id const> b, net_id carry_in, fa_style style )
{
  if ( a.size() < 2u )
    throw error( error_kind::group_too_small, "BCLA groups need at least 2 bits, got " + std::to_string( a.size() ) );
  auto const gp = pg_logic( nl, a, b );
  auto const prefix = block_gp( nl, gp );
  auto const cout = nl.add_gate1( "AO21", { prefix.block_propagate(), carry_in, prefix.block_generate() } );

  auto const top = a.size() - 1u;
  auto r = ripple_chain( nl, a.first( top ), b.first( top ), carry_in, style );
  r.sum.push_back( nl.add_gate1( "XOR3", { a[top], b[top], r.carry } ) );
  r.carry = cout;
  return r;
}

/* Whole-adder generators */

inline netlist build_rca( std::uint32_t width, fa_style style = fa_style::cell )
{
  detail::check_width( width );
  detail::adder_builder ab( width );
  auto const r = ripple_chain( ab.nl, ab.a, ab.b, ab.cin, style );
  return std::move( ab ).finish( r.sum, r.carry );
}

inline netlist build_rca_dbfa( std::uint32_t width, fa_style style = fa_style::cell )
{
  detail::check_width( width );
  if ( width % 2u != 0u )
    throw error( error_kind::odd_width, "dual-bit RCA needs an even width, got " + std::to_string( width ) );
  detail::adder_builder ab( width );
  std::vector<net_id> sum;
  auto carry = ab.cin;
  for ( auto i = 0u; i < width; i += 2u )
  {
    auto const [s0, s1, co] = dual_bit_full_adder( ab.nl, ab.a[i], ab.b[i], ab.a[i + 1u], ab.b[i + 1u], carry, style );
    sum.push_back( s0 );
    sum.push_back( s1 );
    carry = co;
  }
  return std::move( ab ).finish( sum, carry );
}

/*! \brief Stand-alone BEC fragment with inputs `x[i]` and outputs `y[i]`. */
inline netlist build_bec( std::uint32_t k )
{
  if ( k < 2u || k > 32u )
    throw error( error_kind::invalid_width, "BEC width must be in [2, 32], got " + std::to_string( k ) );
  netlist nl( k );
  std::vector<net_id> x;
  for ( auto i = 0u; i < k; ++i )
    x.push_back( nl.add_input( bus_name( "x", i ) ) );
  auto const y = bec_logic( nl, x );
  for ( auto i = 0u; i < k; ++i )
    nl.add_output( bus_name( "y", i ), y[i] );
  return nl;
}

/*! \brief Carry-select adder. The LSB group ripples from `cin`; every other
 *  group precomputes both carry cases (dual RCAs, or one RCA plus a BEC)
 *  and selects with MUX2 gates driven by the previous group's carry. */
inline netlist build_csla( std::uint32_t width, std::span<std::uint32_t const> partition, bool use_bec,
                           fa_style style = fa_style::cell )
{
  detail::check_width( width );
  detail::check_partition( partition, width, use_bec ? "CSLA_BEC" : "CSLA" );
  detail::adder_builder ab( width );
  auto& nl = ab.nl;
  std::span<net_id const> a( ab.a ), b( ab.b );

  auto const first = partition[0];
  auto lsb = ripple_chain( nl, a.first( first ), b.first( first ), ab.cin, style );
  std::vector<net_id> sum = lsb.sum;
  auto select = lsb.carry;

  auto offset = first;
  for ( auto gi = 1u; gi < partition.size(); ++gi )
  {
    auto const k = partition[gi];
    auto const ga = a.subspan( offset, k );
    auto const gb = b.subspan( offset, k );

    /* operands for carry-in 0 and 1, each k sum bits plus carry */
    std::vector<net_id> zero, one;
    auto const r0 = ripple_chain( nl, ga, gb, nl.tie( false ), style );
    zero = r0.sum;
    zero.push_back( r0.carry );
    if ( use_bec )
    {
      one = bec_logic( nl, zero );
    }
    else
    {
      auto const r1 = ripple_chain( nl, ga, gb, nl.tie( true ), style );
      one = r1.sum;
      one.push_back( r1.carry );
    }
    std::vector<net_id> chosen;
    for ( auto i = 0u; i <= k; ++i )
      chosen.push_back( nl.add_gate1( "MUX2", { zero[i], one[i], select } ) );
    sum.insert( sum.end(), chosen.begin(), chosen.end() - 1 );
    select = chosen.back();
    offset += k;
  }
  return std::move( ab ).finish( sum, select );
}

namespace detail
{

enum class cla_kind
{
  recursive,
  block
};

inline netlist build_cla( cla_kind kind, std::uint32_t width, std::uint32_t rca_bits, std::span<std::uint32_t const> partition,
                          fa_style style, std::string_view name )
{
  check_width( width );
  if ( partition.empty() )
    throw error( error_kind::partition_mismatch, std::string( name ) + " needs at least one lookahead group" );
  if ( rca_bits >= width )
    throw error( error_kind::partition_mismatch, std::string( name ) + " ripple segment must be narrower than the adder" );
  check_partition( partition, width - rca_bits, name );
  if ( kind == cla_kind::block )
  {
    for ( auto k : partition )
      if ( k < 2u )
        throw error( error_kind::group_too_small, std::string( name ) + " groups need at least 2 bits" );
  }

  adder_builder ab( width );
  std::span<net_id const> a( ab.a ), b( ab.b );
  std::vector<net_id> sum;
  auto carry = ab.cin;
  if ( rca_bits > 0u )
  {
    auto const r = ripple_chain( ab.nl, a.first( rca_bits ), b.first( rca_bits ), carry, style );
    sum = r.sum;
    carry = r.carry;
  }
  auto offset = rca_bits;
  for ( auto k : partition )
  {
    auto const ga = a.subspan( offset, k );
    auto const gb = b.subspan( offset, k );
    auto const r = kind == cla_kind::recursive ? rcla_group( ab.nl, ga, gb, carry ) : bcla_group( ab.nl, ga, gb, carry, style );
    sum.insert( sum.end(), r.sum.begin(), r.sum.end() );
    carry = r.carry;
    offset += k;
  }
  return std::move( ab ).finish( sum, carry );
}

} // namespace detail

inline netlist build_rcla( std::uint32_t width, std::span<std::uint32_t const> partition )
{
  return detail::build_cla( detail::cla_kind::recursive, width, 0u, partition, fa_style::cell, "RCLA" );
}

inline netlist build_rcla_rca( std::uint32_t width, std::uint32_t rca_bits, std::span<std::uint32_t const> partition,
                               fa_style style = fa_style::cell )
{
  if ( rca_bits == 0u )
    throw error( error_kind::partition_mismatch, "RCLA_RCA needs a non-empty ripple segment" );
  return detail::build_cla( detail::cla_kind::recursive, width, rca_bits, partition, style, "RCLA_RCA" );
}

inline netlist build_bcla( std::uint32_t width, std::span<std::uint32_t const> partition, fa_style style = fa_style::cell )
{
  return detail::build_cla( detail::cla_kind::block, width, 0u, partition, style, "BCLA" );
}

inline netlist build_bcla_rca( std::uint32_t width, std::uint32_t rca_bits, std::span<std::uint32_t const> partition,
                               fa_style style = fa_style::cell )
{
  if ( rca_bits == 0u )
    throw error( error_kind::partition_mismatch, "BCLA_RCA needs a non-empty ripple segment" );
  return detail::build_cla( detail::cla_kind::block, width, rca_bits, partition, style, "BCLA_RCA" );
}

/* Configuration-driven construction */

struct adder_config
{
  architecture arch{ architecture::rca_fa };
  std::uint32_t width{ 32u };
  /* LSB group first; for hybrids this covers only the lookahead part */
  std::vector<std::uint32_t> partition;
  fa_style style{ fa_style::cell };
  std::uint32_t rca_bits{};
};

/*! \brief Uniform groups of `size` bits with the remainder placed in the
 *  most significant group. */
inline std::vector<std::uint32_t> uniform_partition( std::uint32_t bits, std::uint32_t size )
{
  std::vector<std::uint32_t> groups( bits / size, size );
  if ( bits % size != 0u )
    groups.push_back( bits % size );
  return groups;
}

/* Table 1's "8-7-6-4-3-2-2", MSB group first */
inline std::vector<std::uint32_t> reference_csla_partition()
{
  return { 2u, 2u, 3u, 4u, 6u, 7u, 8u };
}

/*! \brief Default configuration of each architecture.
 *
 *  Homogeneous lookahead adders use 4-bit groups. Hybrids use a 2-bit
 *  ripple segment followed by 4-bit groups: with the default library a
 *  2-bit FA chain (90 ps) delivers its carry before a 4-bit group's block
 *  generate is ready (96 ps), which a 4-bit chain (180 ps) does not.
 *  RCA_DBFA defaults to the gate-level dual-bit adder with embedded
 *  lookahead carry.
 */
inline adder_config default_config( architecture arch, std::uint32_t width = 32u )
{
  adder_config cfg;
  cfg.arch = arch;
  cfg.width = width;
  switch ( arch )
  {
  case architecture::rca_fa:
    break;
  case architecture::rca_dbfa:
    cfg.style = fa_style::gates;
    break;
  case architecture::rcla:
  case architecture::bcla:
    cfg.partition = uniform_partition( width, 4u );
    break;
  case architecture::rcla_rca:
  case architecture::bcla_rca:
    cfg.rca_bits = width > 4u ? 2u : 1u;
    cfg.partition = uniform_partition( width - cfg.rca_bits, 4u );
    break;
  case architecture::csla:
  case architecture::csla_bec:
    if ( width == 32u )
      cfg.partition = reference_csla_partition();
    else
      cfg.partition = uniform_partition( width, width <= 8u ? 2u : 4u );
    break;
  }
  /* a 1-bit remainder group is not a valid block lookahead group */
  if ( ( arch == architecture::bcla || arch == architecture::bcla_rca ) && cfg.partition.size() > 1u && cfg.partition.back() == 1u )
  {
    cfg.partition.pop_back();
    cfg.partition.back() += 1u;
  }
  return cfg;
}

inline netlist build_adder( adder_config const& cfg )
{
  switch ( cfg.arch )
  {
  case architecture::rca_fa:
    return build_rca( cfg.width, cfg.style );
  case architecture::rca_dbfa:
    return build_rca_dbfa( cfg.width, cfg.style );
  case architecture::rcla:
    return build_rcla( cfg.width, cfg.partition );
  case architecture::rcla_rca:
    return build_rcla_rca( cfg.width, cfg.rca_bits, cfg.partition, cfg.style );
  case architecture::bcla:
    return build_bcla( cfg.width, cfg.partition, cfg.style );
  case architecture::bcla_rca:
    return build_bcla_rca( cfg.width, cfg.rca_bits, cfg.partition, cfg.style );
  case architecture::csla:
    return build_csla( cfg.width, cfg.partition, false, cfg.style );
  case architecture::csla_bec:
    return build_csla( cfg.width, cfg.partition, true, cfg.style );
  }
  throw error( error_kind::invalid_params, "unknown architecture" );
}

} // namespace adderlab
