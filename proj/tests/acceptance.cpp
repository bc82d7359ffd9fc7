/* Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure. */

#include "oracles.hpp"

#include <adderlab/adderlab.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace adderlab;

namespace
{

struct outcome
{
  bool ok{ true };
  std::vector<std::string> notes;

  void expect( bool condition, std::string const& what )
  {
    if ( !condition )
    {
      ok = false;
      notes.push_back( what );
    }
  }
};

cell_library const& lib()
{
  static auto const l = load_cell_library();
  return l;
}

outcome functional_correctness()
{
  outcome out;
  for ( auto arch : all_architectures() )
  {
    for ( auto width : { 4u, 8u } )
    {
      compiled_netlist const cn( build_adder( default_config( arch, width ) ), lib() );
      std::uint64_t bad = 0u;
      for ( std::uint64_t a = 0u; a < ( 1u << width ); ++a )
        for ( std::uint64_t b = 0u; b < ( 1u << width ); ++b )
          for ( bool cin : { false, true } )
          {
            auto const r = simulate( cn, { a, b, cin } );
            bad += std::pair{ r.sum, r.cout } != oracle::add( a, b, cin, width ) ? 1u : 0u;
          }
      out.expect( bad == 0u, fmt::format( "{} w={}: {} exhaustive mismatches", to_string( arch ), width, bad ) );
    }
    compiled_netlist const cn( build_adder( default_config( arch, 32u ) ), lib() );
    oracle::operand_source src( 20240601u, 32u );
    std::uint64_t bad = 0u;
    for ( auto i = 0u; i < 100000u; ++i )
    {
      auto const a = src.operand(), b = src.operand();
      auto const cin = src.bit();
      auto const r = simulate( cn, { a, b, cin } );
      bad += std::pair{ r.sum, r.cout } != oracle::add( a, b, cin, 32u ) ? 1u : 0u;
    }
    out.expect( bad == 0u, fmt::format( "{} w=32: {} random mismatches", to_string( arch ), bad ) );
  }
  return out;
}

outcome fixture_conclusions()
{
  outcome out;
  auto const table = load_metrics_fixture( ADDERLAB_DATA_DIR "/measured_adders.csv" );
  std::pair<combo_metric, char const*> const expected[] = {
      { combo_metric::pdp, "Adder8" }, { combo_metric::edp, "Adder8" }, { combo_metric::adp, "Adder11" }, { combo_metric::pdap, "Adder1" } };
  for ( auto const& [m, legend] : expected )
  {
    auto const got = argmin( table.rows, m );
    out.expect( got == legend, fmt::format( "argmin {} = {}, expected {}", to_string( m ), got, legend ) );
  }
  auto const excess = delay_exceedance( table.at( "Adder1" ).delay_ns, table.at( "Adder11" ).delay_ns );
  out.expect( std::abs( excess - 196.5 ) <= 0.1, fmt::format( "delay exceedance {:.3f}%, expected 196.5%", excess ) );
  return out;
}

outcome structural_fidelity()
{
  outcome out;
  auto const rca = build_rca( 32, fa_style::cell );
  out.expect( rca.count_cells( "FA" ) == 32u, fmt::format( "RCA has {} FA", rca.count_cells( "FA" ) ) );
  auto const dbfa = build_rca_dbfa( 32 );
  out.expect( dbfa.count_cells( "DBFA" ) == 16u, fmt::format( "RCA_DBFA has {} DBFA", dbfa.count_cells( "DBFA" ) ) );

  compiled_netlist const bec( build_bec( 5 ), lib() );
  for ( auto x = 0u; x < 32u; ++x )
  {
    std::vector<bool> in( 5 );
    for ( auto i = 0u; i < 5u; ++i )
      in[i] = ( x >> i ) & 1u;
    auto const y = bec.evaluate( in );
    auto value = 0u;
    for ( auto i = 0u; i < 5u; ++i )
      value |= unsigned( y[i] ) << i;
    out.expect( value == ( x + 1u ) % 32u, fmt::format( "BEC({}) = {}", x, value ) );
  }

  auto const csla = build_csla( 32, std::vector<std::uint32_t>{ 2u, 2u, 3u, 4u, 6u, 7u, 8u }, false );
  out.expect( csla.count_cells( "FA" ) == 62u && csla.count_cells( "MUX2" ) == 36u,
              fmt::format( "CSLA has {} FA and {} MUX2", csla.count_cells( "FA" ), csla.count_cells( "MUX2" ) ) );

  /* every path from one intermediate group's carry-in to the next must be a single AO21 */
  std::vector<std::uint32_t> const groups( 8, 4u );
  for ( auto const& [name, nl] : { std::pair{ "RCLA", build_rcla( 32, groups ) }, std::pair{ "BCLA", build_bcla( 32, groups ) } } )
  {
    auto const ports = resolve_adder_ports( nl );
    auto const carry_into = [&]( std::uint32_t k ) {
      for ( auto const& g : nl.gates() )
        if ( g.outputs[0] == ports.sum[4u * k] )
          return g.inputs.back();
      return ports.cin;
    };
    std::function<void( net_id, net_id, std::vector<std::string>&, std::vector<std::vector<std::string>>& )> walk =
        [&]( net_id from, net_id to, std::vector<std::string>& path, std::vector<std::vector<std::string>>& found ) {
          if ( from == to )
          {
            found.push_back( path );
            return;
          }
          for ( auto const& g : nl.gates() )
            if ( std::find( g.inputs.begin(), g.inputs.end(), from ) != g.inputs.end() )
            {
              path.push_back( g.cell );
              for ( auto o : g.outputs )
                walk( o, to, path, found );
              path.pop_back();
            }
        };
    for ( auto k = 1u; k + 1u < 8u; ++k )
    {
      std::vector<std::string> path;
      std::vector<std::vector<std::string>> found;
      walk( carry_into( k ), carry_into( k + 1u ), path, found );
      out.expect( found.size() == 1u && found[0] == std::vector<std::string>{ "AO21" },
                  fmt::format( "{} group {}: {} carry paths", name, k, found.size() ) );
    }
  }
  return out;
}

outcome ordering_reproduction()
{
  outcome out;
  auto const result = run_bench( default_benchmark_config() );
  auto const& t = result.table;
  auto const delay = [&]( char const* l ) { return t.at( l ).delay_ns; };
  for ( auto const* fast : { "RCLA", "RCLA_RCA", "BCLA", "BCLA_RCA", "CSLA", "CSLA_BEC" } )
    out.expect( delay( "RCA_FA" ) > delay( fast ), fmt::format( "delay RCA_FA {} <= {} {}", delay( "RCA_FA" ), fast, delay( fast ) ) );
  for ( auto const& r : t.rows )
    if ( r.legend != "RCA_FA" )
      out.expect( t.at( "RCA_FA" ).area < r.area, fmt::format( "area RCA_FA not below {}", r.legend ) );
  out.expect( delay( "RCLA_RCA" ) <= delay( "RCLA" ), fmt::format( "RCLA_RCA {} > RCLA {}", delay( "RCLA_RCA" ), delay( "RCLA" ) ) );
  out.expect( delay( "BCLA_RCA" ) <= delay( "BCLA" ), fmt::format( "BCLA_RCA {} > BCLA {}", delay( "BCLA_RCA" ), delay( "BCLA" ) ) );
  out.expect( t.at( "CSLA" ).power_uw > t.at( "RCA_FA" ).power_uw, "power CSLA not above RCA_FA" );
  return out;
}

outcome determinism()
{
  outcome out;
  auto const csv = [] {
    std::ostringstream os;
    write_metrics_csv( os, run_bench( default_benchmark_config() ).table );
    return os.str();
  };
  out.expect( csv() == csv(), "two runs differ" );
  return out;
}

outcome analysis_checks()
{
  outcome out;
  auto const rca = build_rca( 32, fa_style::cell );
  auto const delay = critical_path( rca, lib() ).critical_delay_ps;
  /* 31 carry hops plus the final bit's slower output */
  auto const& fa = lib().at( "FA" );
  auto const expected = 31.0 * fa.outputs[1].delay_ps + std::max( fa.outputs[0].delay_ps, fa.outputs[1].delay_ps );
  out.expect( delay == expected && delay == 1455.0, fmt::format( "RCA32 delay {} ps", delay ) );

  toggle_stats stats;
  stats.vectors_applied = 1001u;
  stats.gates.push_back( { 0u, "U", { 100u } } );
  cell_library unit;
  unit.add( { "U", { "a" }, { { "y", 1.0, 0b10u } }, 1.0, 1.0 } );
  auto const p = avg_power( stats, unit, 5.0 );
  out.expect( p == 0.02, fmt::format( "avg_power {} uW", p ) );

  auto const rows = combo_metrics( std::vector<metrics_input>{ { "a", 1.3, 7.0, 3.1 }, { "b", 2.9, 5.0, 1.7 }, { "c", 0.7, 9.0, 4.4 } } );
  for ( auto m : all_combo_metrics )
  {
    double peak = 0.0, peak_norm = 0.0;
    for ( auto const& r : rows )
      if ( r.value( m ) > peak )
      {
        peak = r.value( m );
        peak_norm = r.normalized( m );
      }
    out.expect( peak_norm == 1.0, fmt::format( "max {} normalizes to {}", to_string( m ), peak_norm ) );
  }
  return out;
}

} // namespace

int main()
{
  std::pair<char const*, outcome ( * )()> const criteria[] = {
      { "functional correctness", functional_correctness }, { "fixture table conclusions", fixture_conclusions },
      { "structural fidelity", structural_fidelity },       { "ordering on generated adders", ordering_reproduction },
      { "determinism", determinism },                        { "analysis unit checks", analysis_checks } };

  auto failures = 0;
  auto index = 1;
  for ( auto const& [name, run] : criteria )
  {
    auto const start = std::chrono::steady_clock::now();
    outcome result;
    try
    {
      result = run();
    }
    catch ( std::exception const& e )
    {
      result.ok = false;
      result.notes.push_back( std::string( "exception: " ) + e.what() );
    }
    auto const ms = std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - start ).count();
    fmt::print( "{} criterion {}: {} ({:.0f} ms)\n", result.ok ? "PASS" : "FAIL", index++, name, ms );
    for ( auto const& n : result.notes )
      fmt::print( "    {}\n", n );
    failures += result.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
