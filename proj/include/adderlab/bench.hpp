/*!
  \file bench.hpp
  \brief Benchmark orchestration: build, verify, time, size and power every
         configured adder on one shared vector stream, then tabulate the
         combined figures of merit. Also reads externally measured tables.
*/

#pragma once

#include "analysis.hpp"
#include "cell_model.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "netlist.hpp"
#include "simulation.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace adderlab
{

struct bench_entry
{
  std::string legend;
  adder_config config;
};

struct benchmark_config
{
  std::vector<bench_entry> adders;
  std::uint64_t n_vectors{ 1000u };
  std::uint64_t seed{ 1u };
  double period_ns{ 5.0 };
  std::optional<std::filesystem::path> cells;
  std::filesystem::path out_dir{ "bench_out" };
  std::vector<std::string> formats{ "csv", "txt", "svg" };
  /* random oracle vectors for adders wider than 8 bits */
  std::uint64_t verify_vectors{ 10000u };
  unsigned threads{ 0u };
};

/*! \brief The eight generated architectures at their default configurations. */
inline std::vector<bench_entry> default_bench_entries( std::uint32_t width = 32u )
{
  std::vector<bench_entry> entries;
  for ( auto arch : all_architectures() )
    entries.push_back( { std::string( to_string( arch ) ), default_config( arch, width ) } );
  return entries;
}

inline benchmark_config default_benchmark_config()
{
  benchmark_config cfg;
  cfg.adders = default_bench_entries();
  return cfg;
}

struct metrics_table
{
  std::vector<metrics_row> rows;
  std::string provenance;

  metrics_row const& at( std::string_view legend ) const
  {
    for ( auto const& r : rows )
      if ( r.legend == legend )
        return r;
    throw error( error_kind::invalid_params, "no row " + std::string( legend ) );
  }
};

struct adder_report
{
  std::string legend;
  adder_config config;
  std::uint32_t gates{};
  std::uint32_t depth{};
  double delay_ps{};
  double area{};
  double power_uw{};
  std::uint64_t toggles{};
  std::string verification;
};

struct bench_result
{
  metrics_table table;
  std::vector<adder_report> adders;
};

/*! \brief Distinct seed for oracle checking so it never aliases the power stream. */
inline std::uint64_t verification_seed( std::uint64_t seed )
{
  return splitmix64( seed ^ 0x5ca1ab1e0ddba11ull );
}

inline adder_report evaluate_adder( bench_entry const& entry, cell_library const& lib, benchmark_config const& cfg )
{
  try
  {
    auto const nl = build_adder( entry.config );
    compiled_netlist const cn( nl, lib );

    adder_report rep;
    rep.legend = entry.legend;
    rep.config = entry.config;
    rep.gates = nl.num_gates();
    rep.depth = cn.levels().depth();

    std::optional<mismatch> bad;
    if ( entry.config.width <= 8u )
    {
      bad = verify_exhaustive( cn );
      rep.verification = "exhaustive";
    }
    else
    {
      bad = verify_random( cn, cfg.verify_vectors, verification_seed( cfg.seed ) );
      rep.verification = fmt::format( "random {}", cfg.verify_vectors );
    }
    if ( bad )
    {
      throw error( error_kind::verification_failed,
                   fmt::format( "a={:#x} b={:#x} cin={} gave sum={:#x} cout={}, expected sum={:#x} cout={}", bad->vector.a,
                                bad->vector.b, bad->vector.cin ? 1 : 0, bad->actual_sum, bad->actual_cout ? 1 : 0,
                                bad->expected_sum, bad->expected_cout ? 1 : 0 ) );
    }

    rep.delay_ps = critical_path( nl, lib ).critical_delay_ps;
    rep.area = area( nl, lib );
    auto const toggles = run_vectors( cn, cfg.n_vectors, cfg.seed, cfg.period_ns );
    rep.toggles = toggles.total();
    rep.power_uw = avg_power( toggles, lib, cfg.period_ns );
    return rep;
  }
  catch ( error const& e )
  {
    throw error( e.kind(), entry.legend + ": " + e.message() );
  }
}

inline void check_bench_config( benchmark_config const& cfg )
{
  if ( cfg.adders.empty() )
    throw error( error_kind::invalid_params, "benchmark has no adders" );
  if ( cfg.n_vectors < 2u )
    throw error( error_kind::invalid_params, "n_vectors must be at least 2" );
  if ( !( cfg.period_ns > 0.0 ) )
    throw error( error_kind::invalid_params, "period_ns must be positive" );
  std::set<std::string> seen;
  for ( auto const& e : cfg.adders )
    if ( !seen.insert( e.legend ).second )
      throw error( error_kind::invalid_params, "duplicate legend " + e.legend );
}

/*! \brief Runs every adder on the same (seed, n_vectors) stream. Rows keep
 *  the configuration order. */
inline bench_result run_bench( benchmark_config const& cfg, cell_library const& lib )
{
  check_bench_config( cfg );
  std::vector<adder_report> reports( cfg.adders.size() );
  auto const threads = cfg.threads == 0u ? std::max( 1u, std::thread::hardware_concurrency() ) : cfg.threads;
  if ( threads <= 1u )
  {
    for ( auto i = 0u; i < cfg.adders.size(); ++i )
      reports[i] = evaluate_adder( cfg.adders[i], lib, cfg );
  }
  else
  {
    std::vector<std::future<adder_report>> jobs;
    for ( auto const& entry : cfg.adders )
      jobs.push_back( std::async( std::launch::async, [&entry, &lib, &cfg] { return evaluate_adder( entry, lib, cfg ); } ) );
    for ( auto i = 0u; i < jobs.size(); ++i )
      reports[i] = jobs[i].get();
  }

  std::vector<metrics_input> inputs;
  for ( auto const& r : reports )
    inputs.push_back( { r.legend, r.delay_ps / 1000.0, r.area, r.power_uw } );
  bench_result result;
  result.table.rows = combo_metrics( inputs );
  result.table.provenance = "generated";
  result.adders = std::move( reports );
  return result;
}

inline bench_result run_bench( benchmark_config const& cfg )
{
  return run_bench( cfg, load_cell_library( cfg.cells ) );
}

/* Fixture tables */

/*! \brief Reads `legend,delay_ns,area,power_uW` rows and derives the
 *  combined metrics. */
inline metrics_table read_metrics_fixture( std::istream& in, std::string const& source = "fixture" )
{
  std::string line;
  std::size_t line_no = 0u;
  bool header = false;
  std::vector<metrics_input> inputs;
  std::set<std::string> seen;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    if ( !line.empty() && line.back() == '\r' )
      line.pop_back();
    if ( line.empty() || line.front() == '#' )
      continue;
    auto const where = source + ":" + std::to_string( line_no );
    auto fields = detail::split( line, ',' );
    if ( !header )
    {
      std::string lowered;
      for ( auto f : fields )
      {
        for ( auto c : f )
          lowered += static_cast<char>( std::tolower( static_cast<unsigned char>( c ) ) );
        lowered += ',';
      }
      if ( lowered != "legend,delay_ns,area,power_uw," )
        throw error( error_kind::parse_error, where + ": expected header legend,delay_ns,area,power_uW" );
      header = true;
      continue;
    }
    if ( fields.size() != 4u || fields[0].empty() )
      throw error( error_kind::parse_error, where + ": expected 4 fields" );
    metrics_input row{ std::string( fields[0] ), detail::parse_double( fields[1], where ),
                       detail::parse_double( fields[2], where ), detail::parse_double( fields[3], where ) };
    if ( !seen.insert( row.legend ).second )
      throw error( error_kind::parse_error, where + ": duplicate legend " + row.legend );
    inputs.push_back( std::move( row ) );
  }
  if ( inputs.empty() )
    throw error( error_kind::parse_error, source + ": no data rows" );
  return { combo_metrics( inputs ), "fixture" };
}

inline metrics_table load_metrics_fixture( std::filesystem::path const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw error( error_kind::io_error, "cannot open " + path.string() );
  return read_metrics_fixture( in, path.string() );
}

/* Reports */

inline void write_metrics_csv( std::ostream& os, metrics_table const& table )
{
  os << "legend,delay_ns,area,power_uw,pdp,edp,adp,pdap,n_pdp,n_edp,n_adp,n_pdap\n";
  for ( auto const& r : table.rows )
  {
    os << fmt::format( "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.legend, r.delay_ns,
                       r.area, r.power_uw, r.pdp, r.edp, r.adp, r.pdap, r.n_pdp, r.n_edp, r.n_adp, r.n_pdap );
  }
}

inline void write_text_table( std::ostream& os, metrics_table const& table )
{
  std::size_t legend_width = 12u;
  for ( auto const& r : table.rows )
    legend_width = std::max( legend_width, r.legend.size() );

  std::array<std::string, 4> best;
  for ( auto i = 0u; i < all_combo_metrics.size(); ++i )
    best[i] = argmin( table.rows, all_combo_metrics[i] );
  auto const mark = [&]( metrics_row const& r, std::size_t i ) { return r.legend == best[i] ? "*" : " "; };

  os << fmt::format( "{:<{}}  {:>10}  {:>10}  {:>11}  {:>7}  {:>7}  {:>7}  {:>7}\n", "Adder Legend", legend_width, "Delay (ns)",
                     "Area", "Power (uW)", "n_PDP", "n_EDP", "n_ADP", "n_PDAP" );
  for ( auto const& r : table.rows )
  {
    os << fmt::format( "{:<{}}  {:>10.2f}  {:>10.2f}  {:>11.2f}  {:>6.3f}{}  {:>6.3f}{}  {:>6.3f}{}  {:>6.3f}{}\n", r.legend,
                       legend_width, r.delay_ns, r.area, r.power_uw, r.n_pdp, mark( r, 0 ), r.n_edp, mark( r, 1 ), r.n_adp,
                       mark( r, 2 ), r.n_pdap, mark( r, 3 ) );
  }
  os << "\n* least value of the combined metric (normalized to the largest value in this table)\n";
  for ( auto i = 0u; i < all_combo_metrics.size(); ++i )
    os << fmt::format( "best {:<4} {}\n", to_string( all_combo_metrics[i] ), best[i] );
  if ( table.provenance == "generated" )
  {
    os << "\npower: zero-delay toggle model (settled values only, glitches not counted)\n";
  }
}

/*! \brief Grouped bar chart of the four normalized metrics; the least bar
 *  of each metric is drawn in red. */
inline void write_svg_chart( std::ostream& os, metrics_table const& table )
{
  auto const n = table.rows.size();
  double const bar = 14.0, gap = 30.0, left = 60.0, top = 40.0, plot_h = 260.0;
  double const group_w = static_cast<double>( n ) * bar + gap;
  double const width = left + 4.0 * group_w + 180.0;
  double const height = top + plot_h + 60.0;
  static constexpr std::array<char const*, 12> palette{ "#4e79a7", "#59a14f", "#9c755f", "#edc948", "#b07aa1", "#76b7b2",
                                                        "#f28e2b", "#bab0ac", "#8cd17d", "#86bcb6", "#499894", "#d4a6c8" };

  os << fmt::format( "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
                     "font-size=\"11\">\n",
                     width, height );
  os << fmt::format( "<text x=\"{:.0f}\" y=\"20\" font-size=\"14\">Normalized combined design metrics ({})</text>\n", left,
                     table.provenance );
  for ( auto tick = 0; tick <= 4; ++tick )
  {
    auto const y = top + plot_h - plot_h * tick / 4.0;
    os << fmt::format( "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n", left, y,
                       left + 4.0 * group_w, y );
    os << fmt::format( "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 6.0, y + 4.0, tick / 4.0 );
  }
  for ( auto m = 0u; m < all_combo_metrics.size(); ++m )
  {
    auto const metric = all_combo_metrics[m];
    auto const best = argmin( table.rows, metric );
    auto const x0 = left + m * group_w + gap / 2.0;
    for ( auto i = 0u; i < n; ++i )
    {
      auto const& r = table.rows[i];
      auto const h = plot_h * r.normalized( metric );
      auto const fill = r.legend == best ? "#d62728" : palette[i % palette.size()];
      os << fmt::format( "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"><title>{} {} {:.4f}</title></rect>\n",
                         x0 + i * bar, top + plot_h - h, bar - 2.0, h, fill, r.legend, to_string( metric ), r.normalized( metric ) );
    }
    os << fmt::format( "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x0 + n * bar / 2.0, top + plot_h + 18.0,
                       to_string( metric ) );
  }
  auto const legend_x = left + 4.0 * group_w + 20.0;
  for ( auto i = 0u; i < n; ++i )
  {
    auto const y = top + i * 16.0;
    os << fmt::format( "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", legend_x, y,
                       palette[i % palette.size()] );
    os << fmt::format( "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", legend_x + 14.0, y + 9.0, table.rows[i].legend );
  }
  os << fmt::format( "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"#d62728\"/>\n", legend_x, top + n * 16.0 + 8.0 );
  os << fmt::format( "<text x=\"{:.1f}\" y=\"{:.1f}\">least value</text>\n", legend_x + 14.0, top + n * 16.0 + 17.0 );
  os << "</svg>\n";
}

/*! \brief Writes the requested report formats into `dir`; returns the paths written. */
inline std::vector<std::filesystem::path> write_reports( metrics_table const& table, std::filesystem::path const& dir,
                                                         std::vector<std::string> const& formats )
{
  std::filesystem::create_directories( dir );
  std::vector<std::filesystem::path> written;
  auto const emit = [&]( std::string const& name, auto&& writer ) {
    auto const path = dir / name;
    std::ofstream os( path, std::ios::binary );
    if ( !os )
      throw error( error_kind::io_error, "cannot write " + path.string() );
    writer( os, table );
    written.push_back( path );
  };
  for ( auto const& f : formats )
  {
    if ( f == "csv" )
      emit( "metrics.csv", write_metrics_csv );
    else if ( f == "txt" )
      emit( "table.txt", write_text_table );
    else if ( f == "svg" )
      emit( "figure.svg", write_svg_chart );
    else
      throw error( error_kind::invalid_params, "unknown report format " + f );
  }
  return written;
}

/* Configuration files */

/*! \brief Parses a JSON benchmark description. Each adder starts from the
 *  architecture's default configuration; listed fields override it. */
inline benchmark_config parse_benchmark_config( std::string_view text )
{
  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse( text );
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw error( error_kind::parse_error, std::string( "benchmark config: " ) + e.what() );
  }

  try
  {
    benchmark_config cfg = default_benchmark_config();
    if ( doc.contains( "n_vectors" ) )
      cfg.n_vectors = doc.at( "n_vectors" ).get<std::uint64_t>();
    if ( doc.contains( "seed" ) )
      cfg.seed = doc.at( "seed" ).get<std::uint64_t>();
    if ( doc.contains( "period_ns" ) )
      cfg.period_ns = doc.at( "period_ns" ).get<double>();
    if ( doc.contains( "cells" ) )
      cfg.cells = doc.at( "cells" ).get<std::string>();
    if ( doc.contains( "out_dir" ) )
      cfg.out_dir = doc.at( "out_dir" ).get<std::string>();
    if ( doc.contains( "formats" ) )
      cfg.formats = doc.at( "formats" ).get<std::vector<std::string>>();
    if ( doc.contains( "verify_vectors" ) )
      cfg.verify_vectors = doc.at( "verify_vectors" ).get<std::uint64_t>();
    if ( doc.contains( "threads" ) )
      cfg.threads = doc.at( "threads" ).get<unsigned>();
    if ( doc.contains( "adders" ) )
    {
      cfg.adders.clear();
      for ( auto const& item : doc.at( "adders" ) )
      {
        auto const arch = parse_architecture( item.at( "arch" ).get<std::string>() );
        auto const width = item.value( "width", 32u );
        bench_entry entry{ item.value( "legend", std::string( to_string( arch ) ) ), default_config( arch, width ) };
        if ( item.contains( "partition" ) )
          entry.config.partition = item.at( "partition" ).get<std::vector<std::uint32_t>>();
        if ( item.contains( "fa_style" ) )
          entry.config.style = parse_fa_style( item.at( "fa_style" ).get<std::string>() );
        if ( item.contains( "rca_bits" ) )
          entry.config.rca_bits = item.at( "rca_bits" ).get<std::uint32_t>();
        cfg.adders.push_back( std::move( entry ) );
      }
    }
    return cfg;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw error( error_kind::parse_error, std::string( "benchmark config: " ) + e.what() );
  }
}

inline benchmark_config load_benchmark_config( std::filesystem::path const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw error( error_kind::io_error, "cannot open " + path.string() );
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_benchmark_config( buffer.str() );
}

} // namespace adderlab
