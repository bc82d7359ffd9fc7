#include <adderlab/adderlab.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace adderlab;

namespace
{

/* reports "<stage> failed: ..." on stderr and returns a non-zero code */
template<typename Fn>
int run_stage( std::string const& stage, Fn&& fn )
{
  try
  {
    return fn();
  }
  catch ( adderlab::error const& e )
  {
    fmt::print( stderr, "adderlab: {} failed: {}\n", stage, e.what() );
  }
  catch ( std::exception const& e )
  {
    fmt::print( stderr, "adderlab: {} failed: {}\n", stage, e.what() );
  }
  return 1;
}

netlist read_netlist_file( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw error( error_kind::io_error, "cannot open " + path );
  return read_netlist( in, path );
}

cell_library library_from( std::string const& path )
{
  return path.empty() ? load_cell_library() : load_cell_library( std::filesystem::path( path ) );
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "adderlab: gate-level adder generation, verification and benchmarking" };
  app.require_subcommand( 1 );

  /* gen */
  auto* gen = app.add_subcommand( "gen", "generate an adder netlist" );
  std::string gen_arch, gen_style, gen_out;
  std::uint32_t gen_width = 32u;
  std::vector<std::uint32_t> gen_partition;
  std::optional<std::uint32_t> gen_rca_bits;
  gen->add_option( "--arch", gen_arch, "RCA_FA, RCA_DBFA, RCLA, RCLA_RCA, BCLA, BCLA_RCA, CSLA or CSLA_BEC" )->required();
  gen->add_option( "--width", gen_width, "adder width in bits" )->required();
  gen->add_option( "--partition", gen_partition, "group sizes, least significant first" )->delimiter( ',' );
  gen->add_option( "--fa-style", gen_style, "full adders as 'cell' or 'gates'" );
  gen->add_option( "--rca-bits", gen_rca_bits, "ripple segment width of hybrid adders" );
  gen->add_option( "--out", gen_out, "output netlist file ('-' for stdout)" )->required();

  /* check */
  auto* check = app.add_subcommand( "check", "verify a netlist against the reference adder" );
  std::string check_path, check_cells;
  bool check_exhaustive = false;
  std::uint64_t check_vectors = 100000u, check_seed = 1u;
  check->add_option( "netlist", check_path )->required();
  check->add_flag( "--exhaustive", check_exhaustive, "all 2^(2w+1) inputs" );
  check->add_option( "--vectors", check_vectors, "random vectors" );
  check->add_option( "--seed", check_seed, "random seed" );
  check->add_option( "--cells", check_cells, "cell library file" );

  /* sta */
  auto* sta = app.add_subcommand( "sta", "static timing analysis" );
  std::string sta_path, sta_cells;
  sta->add_option( "netlist", sta_path )->required();
  sta->add_option( "--cells", sta_cells, "cell library file" );

  /* power */
  auto* power = app.add_subcommand( "power", "toggle-based average power" );
  std::string power_path, power_cells, power_dump;
  std::uint64_t power_vectors = 1000u, power_seed = 1u;
  double power_period = 5.0;
  unsigned power_workers = 1u;
  power->add_option( "netlist", power_path )->required();
  power->add_option( "--vectors", power_vectors, "number of random vectors" );
  power->add_option( "--seed", power_seed, "random seed" );
  power->add_option( "--period-ns", power_period, "vector period in ns" );
  power->add_option( "--cells", power_cells, "cell library file" );
  power->add_option( "--toggle-dump", power_dump, "write per-gate toggle CSV" );
  power->add_option( "--workers", power_workers, "simulation threads" );

  /* bench */
  auto* bench = app.add_subcommand( "bench", "benchmark the configured adders" );
  std::string bench_config, bench_out, bench_cells;
  std::optional<std::uint64_t> bench_seed, bench_vectors;
  bench->add_option( "--config", bench_config, "JSON benchmark configuration" );
  bench->add_option( "--out-dir", bench_out, "report directory" );
  bench->add_option( "--seed", bench_seed, "random seed" );
  bench->add_option( "--vectors", bench_vectors, "vectors for power estimation" );
  bench->add_option( "--cells", bench_cells, "cell library file" );

  /* metrics */
  auto* metrics = app.add_subcommand( "metrics", "combined metrics from a measured table" );
  std::string metrics_fixture, metrics_out, metrics_exceed;
  metrics->add_option( "--fixture", metrics_fixture, "CSV with legend,delay_ns,area,power_uW" )->required();
  metrics->add_option( "--out-dir", metrics_out, "also write reports into this directory" );
  metrics->add_option( "--exceedance", metrics_exceed, "report delay excess of A over B, given as A:B" );

  CLI11_PARSE( app, argc, argv );

  if ( *gen )
  {
    return run_stage( "gen", [&] {
      auto cfg = default_config( parse_architecture( gen_arch ), gen_width );
      if ( !gen_partition.empty() )
        cfg.partition = gen_partition;
      if ( !gen_style.empty() )
        cfg.style = parse_fa_style( gen_style );
      if ( gen_rca_bits )
        cfg.rca_bits = *gen_rca_bits;
      auto const nl = build_adder( cfg );
      require_valid( nl, load_cell_library() );
      if ( gen_out == "-" )
      {
        write_netlist( std::cout, nl );
      }
      else
      {
        std::ofstream os( gen_out, std::ios::binary );
        if ( !os )
          throw error( error_kind::io_error, "cannot write " + gen_out );
        write_netlist( os, nl );
        fmt::print( "{}: {} gates, {} nets\n", gen_out, nl.num_gates(), nl.num_nets() );
      }
      return 0;
    } );
  }

  if ( *check )
  {
    return run_stage( "check", [&] {
      auto const lib = library_from( check_cells );
      auto const nl = read_netlist_file( check_path );
      compiled_netlist const cn( nl, lib );
      auto const bad = check_exhaustive ? verify_exhaustive( cn ) : verify_random( cn, check_vectors, check_seed );
      if ( bad )
      {
        throw error( error_kind::verification_failed,
                     fmt::format( "a={:#x} b={:#x} cin={}: sum={:#x} cout={}, expected sum={:#x} cout={}", bad->vector.a, bad->vector.b,
                                  bad->vector.cin ? 1 : 0, bad->actual_sum, bad->actual_cout ? 1 : 0, bad->expected_sum,
                                  bad->expected_cout ? 1 : 0 ) );
      }
      if ( check_exhaustive )
        fmt::print( "ok: all {} input combinations match\n", std::uint64_t{ 2 } << ( 2u * nl.width() ) );
      else
        fmt::print( "ok: {} random vectors match (seed {})\n", check_vectors, check_seed );
      return 0;
    } );
  }

  if ( *sta )
  {
    return run_stage( "sta", [&] {
      auto const lib = library_from( sta_cells );
      auto const nl = read_netlist_file( sta_path );
      auto const report = critical_path( nl, lib );
      fmt::print( "critical delay: {:.1f} ps ({:.2f} ns)\n", report.critical_delay_ps, report.critical_delay_ps / 1000.0 );
      fmt::print( "area: {:.2f}\n", area( nl, lib ) );
      fmt::print( "critical path ({} gates):", report.critical_path.size() );
      for ( auto i = 0u; i < report.critical_path.size(); ++i )
      {
        auto const& g = nl.gate( report.critical_path[i] );
        fmt::print( " {}:{}.{}", g.id, g.cell, lib.at( g.cell ).outputs[report.path_pins[i]].pin );
      }
      fmt::print( "\n" );
      for ( auto const& [name, t] : report.output_arrivals )
        fmt::print( "  {:<10} {:8.1f} ps\n", name, t );
      return 0;
    } );
  }

  if ( *power )
  {
    return run_stage( "power", [&] {
      auto const lib = library_from( power_cells );
      auto const nl = read_netlist_file( power_path );
      compiled_netlist const cn( nl, lib );
      auto const stats = run_vectors( cn, power_vectors, power_seed, power_period, power_workers );
      fmt::print( "vectors: {} (seed {}, period {} ns)\n", stats.vectors_applied, stats.seed, power_period );
      fmt::print( "toggles: {}\n", stats.total() );
      fmt::print( "average power: {:.4f} uW (zero-delay toggle model)\n", avg_power( stats, lib, power_period ) );
      if ( !power_dump.empty() )
      {
        std::ofstream os( power_dump, std::ios::binary );
        if ( !os )
          throw error( error_kind::io_error, "cannot write " + power_dump );
        write_toggle_csv( os, stats );
      }
      return 0;
    } );
  }

  if ( *bench )
  {
    return run_stage( "bench", [&] {
      auto cfg = bench_config.empty() ? default_benchmark_config() : load_benchmark_config( bench_config );
      if ( !bench_out.empty() )
        cfg.out_dir = bench_out;
      if ( bench_seed )
        cfg.seed = *bench_seed;
      if ( bench_vectors )
        cfg.n_vectors = *bench_vectors;
      if ( !bench_cells.empty() )
        cfg.cells = bench_cells;
      auto const result = run_bench( cfg );
      for ( auto const& a : result.adders )
      {
        fmt::print( "{:<10} {:4} gates  depth {:3}  verified ({})  toggles {}\n", a.legend, a.gates, a.depth, a.verification,
                    a.toggles );
      }
      fmt::print( "\n" );
      write_text_table( std::cout, result.table );
      for ( auto const& p : write_reports( result.table, cfg.out_dir, cfg.formats ) )
        fmt::print( "wrote {}\n", p.string() );
      return 0;
    } );
  }

  if ( *metrics )
  {
    return run_stage( "metrics", [&] {
      auto const table = load_metrics_fixture( metrics_fixture );
      write_text_table( std::cout, table );
      if ( !metrics_exceed.empty() )
      {
        auto const colon = metrics_exceed.find( ':' );
        if ( colon == std::string::npos )
          throw error( error_kind::invalid_params, "--exceedance expects A:B" );
        auto const& a = table.at( metrics_exceed.substr( 0u, colon ) );
        auto const& b = table.at( metrics_exceed.substr( colon + 1u ) );
        fmt::print( "delay of {} exceeds {} by {:.1f}%\n", a.legend, b.legend, delay_exceedance( a.delay_ns, b.delay_ns ) );
      }
      if ( !metrics_out.empty() )
      {
        for ( auto const& p : write_reports( table, metrics_out, { "csv", "txt", "svg" } ) )
          fmt::print( "wrote {}\n", p.string() );
      }
      return 0;
    } );
  }
  return 0;
}
