/*!
  \file analysis.hpp
  \brief Static timing, area and toggle-based power, and the combined
         figures of merit (PDP, EDP, ADP, PDAP) with max-normalization.
*/

#pragma once

#include "cell_model.hpp"
#include "error.hpp"
#include "netlist.hpp"
#include "simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adderlab
{

struct timing_report
{
  double critical_delay_ps{};
  /* gate ids from the launching port to the capturing port */
  std::vector<std::uint32_t> critical_path;
  /* output pin used by each gate on the path */
  std::vector<std::uint32_t> path_pins;
  std::vector<std::pair<std::string, double>> output_arrivals;
  /* arrival time of every net */
  std::vector<double> net_arrival;

  double arrival( net_id n ) const
  {
    return net_arrival.at( to_index( n ) );
  }
};

/*! \brief Longest-path timing with one delay per cell output.
 *
 *  Ports and ties arrive at 0. Ties between equally late candidates are
 *  broken towards the smallest driving gate id, which makes the reported
 *  path reproducible.
 */
inline timing_report critical_path( netlist const& nl, cell_library const& lib )
{
  require_valid( nl, lib );
  auto const sched = levelize( nl );

  constexpr auto none = detail::no_driver;
  std::vector<double> arrival( nl.num_nets(), 0.0 );
  std::vector<std::uint32_t> driver( nl.num_nets(), none ), driver_pin( nl.num_nets(), 0u );

  for ( auto g : sched.order() )
  {
    auto const& gate = nl.gate( g );
    auto const& cell = lib.at( gate.cell );
    double latest = 0.0;
    for ( auto in : gate.inputs )
      latest = std::max( latest, arrival[to_index( in )] );
    for ( auto o = 0u; o < gate.outputs.size(); ++o )
    {
      auto const n = to_index( gate.outputs[o] );
      arrival[n] = latest + cell.outputs[o].delay_ps;
      driver[n] = g;
      driver_pin[n] = o;
    }
  }

  /* prefer the later net, then the smaller driving gate id (ports last) */
  auto const better = [&]( std::uint32_t lhs, std::uint32_t rhs ) {
    if ( arrival[lhs] != arrival[rhs] )
      return arrival[lhs] > arrival[rhs];
    return driver[lhs] < driver[rhs];
  };

  timing_report report;
  std::optional<std::uint32_t> end;
  for ( auto const& p : nl.outputs() )
  {
    auto const n = to_index( p.net );
    report.output_arrivals.emplace_back( p.name, arrival[n] );
    if ( !end || better( n, *end ) )
      end = n;
  }
  if ( !end )
    return report;

  report.critical_delay_ps = arrival[*end];
  auto net = *end;
  while ( driver[net] != none )
  {
    auto const g = driver[net];
    report.critical_path.push_back( g );
    report.path_pins.push_back( driver_pin[net] );
    auto const& inputs = nl.gate( g ).inputs;
    auto next = to_index( inputs.front() );
    for ( auto in : inputs )
      if ( better( to_index( in ), next ) )
        next = to_index( in );
    net = next;
  }
  std::reverse( report.critical_path.begin(), report.critical_path.end() );
  std::reverse( report.path_pins.begin(), report.path_pins.end() );
  report.net_arrival = std::move( arrival );
  return report;
}

/*! \brief Total cell area; constant ties are free. */
inline double area( netlist const& nl, cell_library const& lib )
{
  double total = 0.0;
  for ( auto const& g : nl.gates() )
    total += lib.at( g.cell ).area;
  return total;
}

/*! \brief Average dynamic power in µW (fJ/ns) over the vector intervals. */
inline double avg_power( toggle_stats const& toggles, cell_library const& lib, double period_ns )
{
  if ( toggles.vectors_applied < 2u )
    throw error( error_kind::invalid_params, "power needs at least 2 applied vectors" );
  if ( !( period_ns > 0.0 ) )
    throw error( error_kind::invalid_params, "period must be positive" );
  double energy_fj = 0.0;
  for ( auto const& g : toggles.gates )
    energy_fj += static_cast<double>( g.total() ) * lib.at( g.cell ).switch_energy_fj;
  return energy_fj / ( static_cast<double>( toggles.vectors_applied - 1u ) * period_ns );
}

/* Figures of merit */

enum class combo_metric
{
  pdp,
  edp,
  adp,
  pdap
};

inline constexpr std::array<combo_metric, 4> all_combo_metrics{ combo_metric::pdp, combo_metric::edp, combo_metric::adp,
                                                                combo_metric::pdap };

inline std::string_view to_string( combo_metric m )
{
  switch ( m )
  {
  case combo_metric::pdp: return "PDP";
  case combo_metric::edp: return "EDP";
  case combo_metric::adp: return "ADP";
  case combo_metric::pdap: return "PDAP";
  }
  return "?";
}

struct metrics_input
{
  std::string legend;
  double delay_ns{};
  double area{};
  double power_uw{};
};

struct metrics_row
{
  std::string legend;
  double delay_ns{};
  double area{};
  double power_uw{};
  double pdp{};  /* µW·ns */
  double edp{};  /* µW·ns² */
  double adp{};  /* area·ns */
  double pdap{}; /* µW·ns·area */
  double n_pdp{}, n_edp{}, n_adp{}, n_pdap{};

  double value( combo_metric m ) const
  {
    switch ( m )
    {
    case combo_metric::pdp: return pdp;
    case combo_metric::edp: return edp;
    case combo_metric::adp: return adp;
    case combo_metric::pdap: return pdap;
    }
    return 0.0;
  }

  double normalized( combo_metric m ) const
  {
    switch ( m )
    {
    case combo_metric::pdp: return n_pdp;
    case combo_metric::edp: return n_edp;
    case combo_metric::adp: return n_adp;
    case combo_metric::pdap: return n_pdap;
    }
    return 0.0;
  }
};

/*! \brief Divides every value by the largest one. */
inline std::vector<double> normalize( std::span<double const> values )
{
  if ( values.empty() )
    throw error( error_kind::empty_input, "nothing to normalize" );
  for ( auto v : values )
    if ( !( v > 0.0 ) )
      throw error( error_kind::non_positive_metric, "normalization needs positive values" );
  auto const peak = *std::max_element( values.begin(), values.end() );
  std::vector<double> out;
  out.reserve( values.size() );
  for ( auto v : values )
    out.push_back( v == peak ? 1.0 : v / peak );
  return out;
}

inline std::vector<metrics_row> combo_metrics( std::span<metrics_input const> rows )
{
  if ( rows.empty() )
    throw error( error_kind::empty_input, "no rows" );
  std::vector<metrics_row> out;
  for ( auto const& in : rows )
  {
    if ( !( in.delay_ns > 0.0 ) || !( in.area > 0.0 ) || !( in.power_uw > 0.0 ) )
      throw error( error_kind::non_positive_metric, "row " + in.legend + " has a non-positive delay, area or power" );
    metrics_row r;
    r.legend = in.legend;
    r.delay_ns = in.delay_ns;
    r.area = in.area;
    r.power_uw = in.power_uw;
    r.pdp = in.power_uw * in.delay_ns;
    r.edp = r.pdp * in.delay_ns;
    r.adp = in.area * in.delay_ns;
    r.pdap = r.pdp * in.area;
    out.push_back( std::move( r ) );
  }

  std::vector<double> column( out.size() );
  auto const fill = [&]( auto member, auto target ) {
    for ( auto i = 0u; i < out.size(); ++i )
      column[i] = out[i].*member;
    auto const norm = normalize( column );
    for ( auto i = 0u; i < out.size(); ++i )
      out[i].*target = norm[i];
  };
  fill( &metrics_row::pdp, &metrics_row::n_pdp );
  fill( &metrics_row::edp, &metrics_row::n_edp );
  fill( &metrics_row::adp, &metrics_row::n_adp );
  fill( &metrics_row::pdap, &metrics_row::n_pdap );
  return out;
}

/*! \brief Legend of the row with the smallest value of `m` (first on ties). */
inline std::string argmin( std::span<metrics_row const> rows, combo_metric m )
{
  if ( rows.empty() )
    throw error( error_kind::empty_input, "no rows" );
  auto const it = std::min_element( rows.begin(), rows.end(),
                                    [m]( auto const& l, auto const& r ) { return l.value( m ) < r.value( m ); } );
  return it->legend;
}

/*! \brief How much `delay` exceeds `baseline`, in percent of `baseline`. */
inline double delay_exceedance( double delay, double baseline )
{
  if ( !( baseline > 0.0 ) )
    throw error( error_kind::divide_by_zero, "baseline delay must be positive" );
  return 100.0 * ( delay - baseline ) / baseline;
}

} // namespace adderlab
