#include <adderlab/analysis.hpp>
#include <adderlab/bench.hpp>
#include <adderlab/generators.hpp>

#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

using namespace adderlab;

namespace
{

cell_library const& lib()
{
  static auto const l = load_cell_library();
  return l;
}

error_kind kind_of( std::function<void()> const& fn )
{
  try
  {
    fn();
  }
  catch ( error const& e )
  {
    return e.kind();
  }
  ADD_FAILURE() << "no adderlab::error thrown";
  return error_kind::invalid_params;
}

/* memoized recursive arrival, independent of the levelizer */
double oracle_delay( netlist const& nl )
{
  std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>> driver;
  for ( auto const& g : nl.gates() )
    for ( auto o = 0u; o < g.outputs.size(); ++o )
      driver[to_index( g.outputs[o] )] = { g.id, o };
  std::map<std::uint32_t, double> memo;
  std::function<double( std::uint32_t )> arrival = [&]( std::uint32_t n ) -> double {
    if ( auto it = memo.find( n ); it != memo.end() )
      return it->second;
    double t = 0.0;
    if ( auto d = driver.find( n ); d != driver.end() )
    {
      auto const& g = nl.gate( d->second.first );
      for ( auto in : g.inputs )
        t = std::max( t, arrival( to_index( in ) ) );
      t += lib().at( g.cell ).outputs[d->second.second].delay_ps;
    }
    return memo[n] = t;
  };
  double worst = 0.0;
  for ( auto const& p : nl.outputs() )
    worst = std::max( worst, arrival( to_index( p.net ) ) );
  return worst;
}

/* copies `part` into `into` with renamed ports and shifted net ids */
void append( netlist& into, netlist const& part, std::string const& prefix )
{
  auto const base = into.num_nets();
  for ( auto i = 0u; i < part.num_nets(); ++i )
    into.add_net();
  auto const shift = [&]( net_id n ) { return net_id{ base + to_index( n ) }; };
  for ( auto const& p : part.inputs() )
    into.add_input( prefix + p.name, shift( p.net ) );
  for ( auto const& p : part.outputs() )
    into.add_output( prefix + p.name, shift( p.net ) );
  for ( auto const& t : part.ties() )
    into.add_tie( shift( t.net ), t.value );
  for ( auto const& g : part.gates() )
  {
    std::vector<net_id> ins, outs;
    for ( auto n : g.inputs )
      ins.push_back( shift( n ) );
    for ( auto n : g.outputs )
      outs.push_back( shift( n ) );
    into.add_gate( g.cell, ins, outs );
  }
}

std::vector<metrics_input> const& fixture()
{
  static std::vector<metrics_input> const rows = [] {
    std::vector<metrics_input> r;
    for ( auto const& row : load_metrics_fixture( ADDERLAB_DATA_DIR "/measured_adders.csv" ).rows )
      r.push_back( { row.legend, row.delay_ns, row.area, row.power_uw } );
    return r;
  }();
  return rows;
}

} // namespace

/* timing */

TEST( analysis, single_full_adder )
{
  auto const r = critical_path( build_rca( 1 ), lib() );
  EXPECT_DOUBLE_EQ( r.critical_delay_ps, 60.0 );
  ASSERT_EQ( r.critical_path.size(), 1u );
}

TEST( analysis, ripple_carry_32 )
{
  auto const nl = build_rca( 32 );
  auto const r = critical_path( nl, lib() );
  /* 31 carry arcs then the last sum */
  auto const& fa = lib().at( "FA" );
  EXPECT_DOUBLE_EQ( r.critical_delay_ps, 31.0 * fa.outputs[1].delay_ps + std::max( fa.outputs[0].delay_ps, fa.outputs[1].delay_ps ) );
  EXPECT_DOUBLE_EQ( r.critical_delay_ps, 1455.0 );
  EXPECT_EQ( r.critical_path.size(), 32u );
  for ( auto i = 0u; i + 1u < r.critical_path.size(); ++i )
    EXPECT_EQ( r.path_pins[i], 1u );
}

TEST( analysis, critical_delay_matches_recursive_model )
{
  for ( auto arch : all_architectures() )
    for ( auto width : { 8u, 32u } )
    {
      auto const nl = build_adder( default_config( arch, width ) );
      EXPECT_DOUBLE_EQ( critical_path( nl, lib() ).critical_delay_ps, oracle_delay( nl ) ) << to_string( arch );
    }
}

TEST( analysis, path_delays_sum_to_critical_delay )
{
  for ( auto arch : all_architectures() )
  {
    auto const nl = build_adder( default_config( arch ) );
    auto const r = critical_path( nl, lib() );
    double total = 0.0, last = 0.0;
    for ( auto i = 0u; i < r.critical_path.size(); ++i )
    {
      auto const& g = nl.gate( r.critical_path[i] );
      total += lib().at( g.cell ).outputs[r.path_pins[i]].delay_ps;
      auto const t = r.arrival( g.outputs[r.path_pins[i]] );
      EXPECT_GT( t, last );
      EXPECT_DOUBLE_EQ( t, total );
      last = t;
      if ( i > 0u )
      {
        auto const prev = nl.gate( r.critical_path[i - 1u] ).outputs[r.path_pins[i - 1u]];
        EXPECT_NE( std::find( g.inputs.begin(), g.inputs.end(), prev ), g.inputs.end() );
      }
    }
    EXPECT_DOUBLE_EQ( total, r.critical_delay_ps ) << to_string( arch );
  }
}

TEST( analysis, arrivals_increase_along_every_gate )
{
  auto const nl = build_adder( default_config( architecture::csla_bec ) );
  auto const r = critical_path( nl, lib() );
  for ( auto const& g : nl.gates() )
    for ( auto in : g.inputs )
      for ( auto o : g.outputs )
        EXPECT_GT( r.arrival( o ), r.arrival( in ) );
  for ( auto const& p : nl.inputs() )
    EXPECT_DOUBLE_EQ( r.arrival( p.net ), 0.0 );
}

TEST( analysis, lookahead_group_carry_arc_is_one_ao21 )
{
  std::vector<std::uint32_t> const part( 8, 4u );
  auto const ao21 = lib().at( "AO21" ).outputs[0].delay_ps;
  for ( auto const& nl : { build_rcla( 32, part ), build_bcla( 32, part ) } )
  {
    auto const r = critical_path( nl, lib() );
    auto const ports = resolve_adder_ports( nl );
    /* the carry entering group k drives the low sum bit of that group */
    auto const group_cin = [&]( std::uint32_t k ) {
      for ( auto const& g : nl.gates() )
        if ( g.outputs[0] == ports.sum[4u * k] )
          return g.inputs.back();
      return net_id{};
    };
    for ( auto k = 1u; k < 7u; ++k )
      EXPECT_DOUBLE_EQ( r.arrival( group_cin( k + 1u ) ) - r.arrival( group_cin( k ) ), ao21 ) << k;
  }
}

TEST( analysis, ties_break_towards_lowest_gate )
{
  netlist nl;
  auto const x = nl.add_input( "x" );
  auto const a = nl.add_gate1( "INV", { x } );
  auto const b = nl.add_gate1( "INV", { x } );
  nl.add_output( "y", nl.add_gate1( "AND2", { b, a } ) );
  auto const r = critical_path( nl, lib() );
  EXPECT_EQ( r.critical_path, ( std::vector<std::uint32_t>{ 0u, 2u } ) );
}

/* area and power */

TEST( analysis, area_sums_cells )
{
  EXPECT_DOUBLE_EQ( area( build_rca( 32 ), lib() ), 32.0 * lib().at( "FA" ).area );
  EXPECT_DOUBLE_EQ( area( build_rca( 32 ), lib() ), 192.0 );
  auto const rca = area( build_adder( default_config( architecture::rca_fa ) ), lib() );
  for ( auto arch : all_architectures() )
    EXPECT_GE( area( build_adder( default_config( arch ) ), lib() ), rca ) << to_string( arch );
}

TEST( analysis, power_formula )
{
  toggle_stats stats;
  stats.vectors_applied = 1000u;
  stats.gates.push_back( { 0u, "INV", { 100u } } );
  auto const e = lib().at( "INV" ).switch_energy_fj;
  EXPECT_DOUBLE_EQ( avg_power( stats, lib(), 5.0 ), 100.0 * e / ( 999.0 * 5.0 ) );

  toggle_stats unit;
  unit.vectors_applied = 1001u;
  unit.gates.push_back( { 0u, "INV", { 100u } } );
  cell_library custom;
  custom.add( { "INV", { "a" }, { { "y", 10.0, 0b01u } }, 1.0, 1.0 } );
  EXPECT_DOUBLE_EQ( avg_power( unit, custom, 5.0 ), 0.02 );

  toggle_stats quiet;
  quiet.vectors_applied = 10u;
  quiet.gates.push_back( { 0u, "FA", { 0u, 0u } } );
  EXPECT_DOUBLE_EQ( avg_power( quiet, lib(), 5.0 ), 0.0 );

  EXPECT_EQ( kind_of( [&] { avg_power( quiet, lib(), 0.0 ); } ), error_kind::invalid_params );
  quiet.vectors_applied = 1u;
  EXPECT_EQ( kind_of( [&] { avg_power( quiet, lib(), 5.0 ); } ), error_kind::invalid_params );
}

TEST( analysis, select_adders_cost_more_than_ripple )
{
  auto const rca = build_adder( default_config( architecture::rca_fa ) );
  auto const csla = build_adder( default_config( architecture::csla ) );
  EXPECT_GT( area( csla, lib() ), area( rca, lib() ) );
  auto const power = [&]( netlist const& nl ) {
    return avg_power( run_vectors( compiled_netlist( nl, lib() ), 1000u, 1u, 5.0 ), lib(), 5.0 );
  };
  EXPECT_GT( power( csla ), power( rca ) );
}

TEST( analysis, disjoint_union_is_additive )
{
  auto const x = build_adder( default_config( architecture::csla_bec, 16u ) );
  auto const y = build_adder( default_config( architecture::bcla, 16u ) );
  netlist both;
  append( both, x, "x_" );
  append( both, y, "y_" );
  EXPECT_TRUE( validate( both, lib() ).empty() );
  EXPECT_DOUBLE_EQ( area( both, lib() ), area( x, lib() ) + area( y, lib() ) );
  auto const dx = critical_path( x, lib() ).critical_delay_ps, dy = critical_path( y, lib() ).critical_delay_ps;
  EXPECT_DOUBLE_EQ( critical_path( both, lib() ).critical_delay_ps, std::max( dx, dy ) );

  auto const tx = run_vectors( compiled_netlist( x, lib() ), 400u, 2u, 5.0 );
  auto const ty = run_vectors( compiled_netlist( y, lib() ), 400u, 2u, 5.0 );
  auto merged = tx;
  merged.gates.insert( merged.gates.end(), ty.gates.begin(), ty.gates.end() );
  EXPECT_NEAR( avg_power( merged, lib(), 5.0 ), avg_power( tx, lib(), 5.0 ) + avg_power( ty, lib(), 5.0 ), 1e-9 );
}

/* figures of merit */

TEST( analysis, combo_values )
{
  auto const rows = combo_metrics( fixture() );
  ASSERT_EQ( rows.size(), 12u );
  auto const& a8 = rows[7];
  EXPECT_EQ( a8.legend, "Adder8" );
  EXPECT_NEAR( a8.pdp, 41.811, 1e-9 );
  EXPECT_NEAR( a8.edp, 41.811 * 1.05, 1e-9 );
  EXPECT_NEAR( a8.adp, 607.91 * 1.05, 1e-9 );
  EXPECT_NEAR( a8.pdap, 41.811 * 607.91, 1e-6 );
}

TEST( analysis, fixture_argmins )
{
  auto const rows = combo_metrics( fixture() );
  EXPECT_EQ( argmin( rows, combo_metric::pdp ), "Adder8" );
  EXPECT_EQ( argmin( rows, combo_metric::edp ), "Adder8" );
  EXPECT_EQ( argmin( rows, combo_metric::adp ), "Adder11" );
  EXPECT_EQ( argmin( rows, combo_metric::pdap ), "Adder1" );
}

TEST( analysis, normalization )
{
  std::vector<double> const v{ 2.0, 4.0 };
  EXPECT_EQ( normalize( v ), ( std::vector<double>{ 0.5, 1.0 } ) );
  std::vector<double> const one{ 3.7 };
  EXPECT_EQ( normalize( one ), std::vector<double>{ 1.0 } );

  std::mt19937 rng( 3u );
  std::uniform_real_distribution<double> dist( 0.1, 1000.0 );
  for ( auto trial = 0u; trial < 50u; ++trial )
  {
    std::vector<double> x( 1u + rng() % 20u ), scaled;
    for ( auto& e : x )
      e = dist( rng );
    auto const k = dist( rng );
    for ( auto e : x )
      scaled.push_back( e * k );
    auto const nx = normalize( x ), ns = normalize( scaled );
    EXPECT_DOUBLE_EQ( *std::max_element( nx.begin(), nx.end() ), 1.0 );
    for ( auto i = 0u; i < x.size(); ++i )
    {
      EXPECT_GT( nx[i], 0.0 );
      EXPECT_LE( nx[i], 1.0 );
      EXPECT_NEAR( nx[i], ns[i], 1e-12 );
    }
  }

  EXPECT_EQ( kind_of( [] { normalize( std::vector<double>{} ); } ), error_kind::empty_input );
  EXPECT_EQ( kind_of( [] { normalize( std::vector<double>{ 1.0, 0.0 } ); } ), error_kind::non_positive_metric );
}

TEST( analysis, normalized_fixture_columns )
{
  auto const rows = combo_metrics( fixture() );
  for ( auto m : all_combo_metrics )
  {
    double peak = 0.0;
    for ( auto const& r : rows )
      peak = std::max( peak, r.value( m ) );
    std::uint32_t ones = 0u;
    for ( auto const& r : rows )
    {
      EXPECT_NEAR( r.normalized( m ), r.value( m ) / peak, 1e-12 );
      ones += r.normalized( m ) == 1.0 ? 1u : 0u;
    }
    EXPECT_EQ( ones, 1u ) << to_string( m );
  }
}

TEST( analysis, combo_rejects_bad_rows )
{
  EXPECT_EQ( kind_of( [] { combo_metrics( std::vector<metrics_input>{} ); } ), error_kind::empty_input );
  std::vector<metrics_input> const bad{ { "x", 1.0, 0.0, 1.0 } };
  EXPECT_EQ( kind_of( [&] { combo_metrics( bad ); } ), error_kind::non_positive_metric );
  EXPECT_EQ( kind_of( [] { argmin( std::vector<metrics_row>{}, combo_metric::pdp ); } ), error_kind::empty_input );
}

TEST( analysis, delay_exceedance )
{
  EXPECT_NEAR( delay_exceedance( 3.35, 1.13 ), 196.46, 0.005 );
  EXPECT_DOUBLE_EQ( delay_exceedance( 1.0, 1.0 ), 0.0 );
  EXPECT_DOUBLE_EQ( delay_exceedance( 2.0, 1.0 ), 100.0 );
  EXPECT_EQ( kind_of( [] { delay_exceedance( 1.0, 0.0 ); } ), error_kind::divide_by_zero );
}
