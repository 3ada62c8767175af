#include "nwpat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "nwpat/rng.hpp"

namespace nwpat {

void ProcessRecipe::validate() const {
  if (steps.empty()) throw ValidationError("recipe: must contain at least one step");
  int decorations = 0;
  bool expose_seen = false;
  for (const ProcessStep& s : steps) {
    if (std::holds_alternative<DecorateStep>(s)) {
      ++decorations;
      if (expose_seen)
        throw ValidationError("recipe: decoration must precede any exposure");
    } else if (std::holds_alternative<ExposeStep>(s)) {
      expose_seen = true;
    }
  }
  if (decorations > 1) throw ValidationError("recipe: at most one decoration step");
}

PipelineContext PipelineContext::create(Calibration cal, PermittivityTable table,
                                        ElectricalParams elec, std::vector<double> grid,
                                        int threads) {
  cal.validate();
  elec.validate();
  if (grid.empty()) throw ValidationError("pipeline: empty wavelength grid");

  std::vector<double> diameters;
  for (double d = 5.0; d <= 140.0 + 1e-9; d += 5.0) diameters.push_back(d);

  PipelineContext ctx;
  ctx.calibration = cal;
  ctx.efficiencies = EfficiencyTable(table, std::move(diameters), grid);
  ctx.permittivity = std::move(table);
  ctx.electrical = elec;
  ctx.wavelengths_nm = std::move(grid);
  ctx.threads = threads;
  return ctx;
}

Spectrum PipelineContext::hg_for(double diameter_nm) const {
  return heat_generation_spectrum(diameter_nm, permittivity, wavelengths_nm);
}

Spectrum make_default_source(const std::vector<double>& grid_nm) {
  Spectrum s;
  s.wavelengths_nm = grid_nm;
  s.values.reserve(grid_nm.size());
  s.units = "per_nm";
  const double center = 350.0, sigma = 15.0;
  for (double wl : grid_nm) {
    double z = (wl - center) / sigma;
    s.values.push_back(std::exp(-0.5 * z * z));
  }
  s.normalize_area();
  return s;
}

namespace {

double mean_diameter(const NetworkState& state) {
  if (state.wires.wires.empty()) return 30.0;
  double acc = 0.0;
  for (const Wire& w : state.wires.wires) acc += w.diameter_nm;
  return acc / static_cast<double>(state.wires.wires.size());
}

const char* step_kind(const ProcessStep& s) {
  if (std::holds_alternative<DecorateStep>(s)) return "decorate";
  if (std::holds_alternative<ExposeStep>(s)) return "expose";
  return "anneal";
}

} // namespace

void run_recipe(NetworkState& state, const ProcessRecipe& recipe,
                const PipelineContext& ctx) {
  recipe.validate();
  if (state.census.empty()) state.record_census("initial");

  for (const ProcessStep& step : recipe.steps) {
    std::uint64_t step_seed = derive_stream(state.stream_seed,
                                            static_cast<std::uint64_t>(state.steps_applied));
    try {
      if (const auto* d = std::get_if<DecorateStep>(&step)) {
        da_decoration(state, d->coverage_fraction, step_seed);
      } else if (const auto* e = std::get_if<ExposeStep>(&step)) {
        Spectrum hg = ctx.hg_for(mean_diameter(state));
        expose_step(state, *e, hg, ctx.calibration, step_seed);
      } else {
        anneal_step(state, std::get<AnnealStep>(step), ctx.calibration, step_seed);
      }
    } catch (const std::exception& ex) {
      throw ModelError("recipe step " + std::to_string(state.steps_applied) + " (" +
                       step_kind(step) + "): " + ex.what());
    }
    state.steps_applied++;
    state.record_census(step_kind(step));
  }
}

// --- inventories --------------------------------------------------------------

RegionInventories build_inventories(const NetworkState& state, const RegionMask& mask,
                                    const Calibration& cal) {
  mask.validate_against(state.wires.domain);

  RegionInventories inv;
  double pitch_area = mask.pitch_um * mask.pitch_um;
  inv.area_exposed_um2 = pitch_area * static_cast<double>(mask.exposed_count());
  inv.area_shadowed_um2 = pitch_area * static_cast<double>(mask.shadowed_count());

  // Broken-junction stub intervals along each wire, in arclength.
  std::vector<std::vector<std::pair<double, double>>> stubs(state.wires.wires.size());
  for (const Junction& j : state.junctions) {
    if (j.state != JunctionState::kBroken) continue;
    for (int wid : {j.wire_a, j.wire_b}) {
      const Wire& w = state.wires.wires[wid];
      double t = (j.position - w.p0).dot(w.direction());
      double sl = cal.stub_length_diameters * w.diameter_nm * 1e-3;
      stubs[wid].emplace_back(std::max(0.0, t - sl), std::min(w.length_um(), t + sl));
    }
  }
  for (auto& iv : stubs) {
    if (iv.size() < 2) continue;
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& s : iv) {
      if (!merged.empty() && s.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, s.second);
      else
        merged.push_back(s);
    }
    iv = std::move(merged);
  }

  for (const Wire& w : state.wires.wires) {
    double len = w.length_um();
    Vec2 dir = w.direction();

    // Pixel-boundary crossings plus stub endpoints partition the wire into
    // pieces of constant (mask class, thickened) attribution.
    std::vector<double> cuts{0.0, len};
    auto add_axis_cuts = [&](double origin, double direction) {
      if (direction == 0.0) return;
      double lo = std::min(origin, origin + direction * len);
      double hi = std::max(origin, origin + direction * len);
      int k0 = static_cast<int>(std::ceil(lo / mask.pitch_um));
      int k1 = static_cast<int>(std::floor(hi / mask.pitch_um));
      for (int k = k0; k <= k1; ++k) {
        double t = (k * mask.pitch_um - origin) / direction;
        if (t > 0.0 && t < len) cuts.push_back(t);
      }
    };
    add_axis_cuts(w.p0.x, dir.x);
    add_axis_cuts(w.p0.y, dir.y);
    for (auto& s : stubs[w.id]) {
      if (s.first > 0.0 && s.first < len) cuts.push_back(s.first);
      if (s.second > 0.0 && s.second < len) cuts.push_back(s.second);
    }
    std::sort(cuts.begin(), cuts.end());

    const auto& wire_stubs = stubs[w.id];
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double piece = cuts[i + 1] - cuts[i];
      if (piece <= kGeomTolUm) continue;
      double tm = 0.5 * (cuts[i] + cuts[i + 1]);
      Vec2 p = w.p0 + dir * tm;
      bool thick = false;
      for (auto& s : wire_stubs)
        if (tm >= s.first && tm <= s.second) {
          thick = true;
          break;
        }
      InventoryItem item{thick ? w.diameter_nm * cal.stub_thickening : w.diameter_nm,
                         piece};
      (mask.exposed_at(p) ? inv.exposed : inv.shadowed).push_back(item);
    }
  }
  return inv;
}

// --- visibility ----------------------------------------------------------------

namespace {

double interp_at(const std::vector<double>& grid, const std::vector<double>& values,
                 double x) {
  Spectrum s;
  s.wavelengths_nm = grid;
  s.values = values;
  return s.value_at(x);
}

std::vector<int> nodes_in_rect(const NetworkGraph& g, const Rect& r) {
  std::vector<int> out;
  for (int i = 2; i < g.node_count; ++i) // skip the electrode rails
    if (r.contains(g.node_positions[i])) out.push_back(i);
  return out;
}

} // namespace

VisibilityReport visibility_report(const NetworkState& state, const RegionMask& mask,
                                   const PipelineContext& ctx,
                                   std::vector<SolveLogRow>* solve_log) {
  if (mask.exposed_count() == 0 || mask.shadowed_count() == 0)
    throw ValidationError("visibility: empty region class");

  RegionInventories inv = build_inventories(state, mask, ctx.calibration);
  double f = ctx.calibration.forward_scatter_fraction;
  RegionOptics cond = region_transmittance_haze(inv.exposed, ctx.efficiencies,
                                                ctx.wavelengths_nm, inv.area_exposed_um2, f);
  RegionOptics insul = region_transmittance_haze(inv.shadowed, ctx.efficiencies,
                                                 ctx.wavelengths_nm, inv.area_shadowed_um2, f);

  VisibilityReport rep;
  rep.wavelengths_nm = ctx.wavelengths_nm;
  rep.t_cond = cond.transmittance;
  rep.h_cond = cond.haze;
  rep.t_insul = insul.transmittance;
  rep.h_insul = insul.haze;
  rep.coverage_cond = cond.coverage;
  rep.coverage_insul = insul.coverage;
  rep.dense_film_warning = cond.dense_film_warning || insul.dense_film_warning;

  double lr = ctx.reference_wavelength_nm;
  rep.delta_t_points =
      100.0 * std::abs(interp_at(rep.wavelengths_nm, rep.t_insul, lr) -
                       interp_at(rep.wavelengths_nm, rep.t_cond, lr));
  rep.delta_h_points =
      100.0 * std::abs(interp_at(rep.wavelengths_nm, rep.h_insul, lr) -
                       interp_at(rep.wavelengths_nm, rep.h_cond, lr));

  NetworkGraph g = build_graph(state.wires, state.junctions,
                               {state.wires.domain.x0, state.wires.domain.x1});
  SheetResistanceResult rs = solve_sheet_resistance(g, ctx.electrical);
  rep.rs_cond_ohm_sq = rs.rs_ohm_sq;
  if (solve_log)
    solve_log->push_back({"rs_cond", rs.rs_ohm_sq, rs.rs_ohm_sq, 1.0, rs.solver_iterations});

  // Probe pads at the shadowed bounding box extremes, 10 um square.
  int min_x = mask.width_px, min_y = mask.height_px, max_x = -1, max_y = -1;
  for (int iy = 0; iy < mask.height_px; ++iy)
    for (int ix = 0; ix < mask.width_px; ++ix)
      if (!mask.bits[static_cast<std::size_t>(iy) * mask.width_px + ix]) {
        min_x = std::min(min_x, ix);
        min_y = std::min(min_y, iy);
        max_x = std::max(max_x, ix);
        max_y = std::max(max_y, iy);
      }
  const double pad = 10.0;
  Rect lo_pad{min_x * mask.pitch_um, min_y * mask.pitch_um,
              min_x * mask.pitch_um + pad, min_y * mask.pitch_um + pad};
  Rect hi_pad{(max_x + 1) * mask.pitch_um - pad, (max_y + 1) * mask.pitch_um - pad,
              (max_x + 1) * mask.pitch_um, (max_y + 1) * mask.pitch_um};
  std::vector<int> pads_a = nodes_in_rect(g, lo_pad);
  std::vector<int> pads_b = nodes_in_rect(g, hi_pad);
  int insul_iters = 0;
  double r_insul = solve_between(g, ctx.electrical, pads_a, pads_b, &insul_iters);
  rep.insulation_ratio = std::isfinite(rep.rs_cond_ohm_sq)
                             ? r_insul / rep.rs_cond_ohm_sq
                             : std::numeric_limits<double>::infinity();
  if (solve_log)
    solve_log->push_back({"insulation", r_insul, rep.rs_cond_ohm_sq,
                          rep.insulation_ratio, insul_iters});
  return rep;
}

// --- fusing-temperature sweep ----------------------------------------------------

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kRaw: return "raw";
    case Variant::kDpin: return "dpin";
    case Variant::kDa: return "da";
    case Variant::kUvDa: return "uv_da";
  }
  return "?";
}

void prepare_variant(NetworkState& state, Variant variant, const PipelineContext& ctx,
                     std::uint64_t seed) {
  switch (variant) {
    case Variant::kRaw:
      state.modifier = NetworkModifier::kRaw;
      break;
    case Variant::kDpin:
      state.modifier = NetworkModifier::kDpinOnly;
      break;
    case Variant::kDa:
      da_decoration(state, ctx.calibration.da_coverage, derive_stream(seed, 1));
      break;
    case Variant::kUvDa: {
      da_decoration(state, ctx.calibration.da_coverage, derive_stream(seed, 1));
      ExposeStep uv;
      uv.mask = std::make_shared<RegionMask>(
          make_uniform_mask(state.wires.domain, state.wires.domain.width() / 8.0, true));
      uv.source_spectrum = make_default_source(ctx.wavelengths_nm);
      Spectrum hg = ctx.hg_for(mean_diameter(state));
      expose_step(state, uv, hg, ctx.calibration, derive_stream(seed, 2));
      break;
    }
  }
}

SweepResult fusing_temperature_sweep(const SweepConfig& cfg, const PipelineContext& ctx,
                                     std::uint64_t seed) {
  if (cfg.replicas < 3) throw ValidationError("sweep: at least 3 replicas required");
  if (cfg.temp_lo_k < 290.0 || cfg.temp_hi_k > 600.0 || cfg.temp_lo_k >= cfg.temp_hi_k)
    throw ValidationError("sweep: temperature range must lie inside the kinetics guard band");
  if (!(cfg.temp_step_k > 0.0)) throw ValidationError("sweep: step must be positive");

  std::vector<double> grid;
  for (double t = cfg.temp_lo_k; t <= cfg.temp_hi_k + 1e-9; t += cfg.temp_step_k)
    grid.push_back(t);

  struct Task {
    Variant variant;
    double diameter;
    std::size_t v_idx, d_idx;
    int replica;
  };
  std::vector<Task> tasks;
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi)
    for (std::size_t di = 0; di < cfg.diameters_nm.size(); ++di)
      for (int r = 0; r < cfg.replicas; ++r)
        tasks.push_back({cfg.variants[vi], cfg.diameters_nm[di], vi, di, r});

  SweepResult result;
  result.replicas.resize(tasks.size());

  parallel_for(tasks.size(), ctx.threads, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    // Geometry stream keyed by (diameter, replica) only, so variants share
    // networks and the Tf difference is a paired comparison.
    std::uint64_t net_seed =
        derive_stream(derive_stream(seed, 0x100 + task.d_idx), task.replica);
    NetworkParams np = cfg.network;
    np.diameter_mean_nm = task.diameter;
    np.seed = net_seed;
    NetworkState prepped = NetworkState::create(generate_network(np), net_seed);
    prepare_variant(prepped, task.variant, ctx,
                    derive_stream(net_seed, 0x200 + task.v_idx));

    Electrodes rails{prepped.wires.domain.x0, prepped.wires.domain.x1};
    NetworkGraph g0 = build_graph(prepped.wires, prepped.junctions, rails);
    SheetResistanceResult base = solve_sheet_resistance(g0, ctx.electrical);
    if (!base.percolating)
      throw ModelError("sweep: replica network does not percolate before annealing");

    std::uint64_t anneal_seed = derive_stream(net_seed, 0x300 + task.v_idx);
    auto collapsed_at = [&](double temp_k) {
      NetworkState s = prepped;
      anneal_step(s, {temp_k, cfg.anneal_duration_s}, ctx.calibration, anneal_seed);
      NetworkGraph g = build_graph(s.wires, s.junctions, rails);
      if (!percolates(g)) return true;
      SheetResistanceResult rs = solve_sheet_resistance(g, ctx.electrical);
      return !rs.percolating || rs.rs_ohm_sq / base.rs_ohm_sq > cfg.collapse_ratio;
    };

    SweepReplicaRow row;
    row.variant = task.variant;
    row.diameter_nm = task.diameter;
    row.replica = task.replica;
    row.r0_ohm_sq = base.rs_ohm_sq;

    // Coupled draws make the collapse indicator monotone in T: bisect the
    // grid for the first collapsing temperature.
    if (!collapsed_at(grid.back())) {
      row.tf_kelvin = std::numeric_limits<double>::infinity();
    } else {
      std::size_t lo = 0, hi = grid.size() - 1;
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (collapsed_at(grid[mid])) hi = mid;
        else lo = mid + 1;
      }
      row.tf_kelvin = grid[hi];
    }
    result.replicas[ti] = row;
  });

  // Median per (variant, diameter); +inf sorts last.
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi)
    for (std::size_t di = 0; di < cfg.diameters_nm.size(); ++di) {
      std::vector<double> tfs;
      for (const auto& row : result.replicas)
        if (row.variant == cfg.variants[vi] && row.diameter_nm == cfg.diameters_nm[di])
          tfs.push_back(row.tf_kelvin);
      std::sort(tfs.begin(), tfs.end());
      SweepSummaryRow s;
      s.variant = cfg.variants[vi];
      s.diameter_nm = cfg.diameters_nm[di];
      s.tf_median_kelvin = tfs[tfs.size() / 2];
      s.replicas = static_cast<int>(tfs.size());
      result.summary.push_back(s);
    }
  return result;
}

// --- linewidth resolution ----------------------------------------------------------

std::vector<ResolutionRow> linewidth_resolution_test(const ResolutionConfig& cfg,
                                                     const PipelineContext& ctx,
                                                     std::uint64_t seed) {
  std::vector<ResolutionRow> rows;
  const Rect domain = cfg.network.domain();

  for (double lw : cfg.linewidths_um) {
    double pitch = std::max(lw / 5.0, 1.0);
    auto mask = std::make_shared<RegionMask>(
        make_line_mask(domain, pitch, lw, lw, LineOrientation::kVertical));
    if (mask->exposed_count() == 0 || mask->shadowed_count() == 0)
      throw ValidationError("resolution: degenerate line mask");

    // Stripe x-intervals of the exposed lines.
    std::vector<std::pair<double, double>> lines;
    double period = 2.0 * lw;
    for (double x0 = 0.0; x0 < domain.width(); x0 += period)
      lines.emplace_back(x0, std::min(x0 + lw, domain.width()));

    std::vector<char> perc_ok(cfg.replicas, 0), insul_ok(cfg.replicas, 0);

    parallel_for(static_cast<std::size_t>(cfg.replicas), ctx.threads, [&](std::size_t r) {
      NetworkParams np = cfg.network;
      np.seed = derive_stream(derive_stream(seed, std::llround(lw * 16.0)), r);
      NetworkState st = NetworkState::create(generate_network(np), np.seed);
      da_decoration(st, cfg.da_coverage, derive_stream(np.seed, 1));
      ExposeStep uv;
      uv.mask = mask;
      uv.intensity_mw_cm2 = cfg.expose_intensity_mw_cm2;
      uv.duration_s = cfg.expose_duration_s;
      uv.source_spectrum = make_default_source(ctx.wavelengths_nm);
      expose_step(st, uv, ctx.hg_for(cfg.network.diameter_mean_nm), ctx.calibration,
                  derive_stream(np.seed, 2));
      anneal_step(st, {cfg.anneal_temperature_k, cfg.anneal_duration_s}, ctx.calibration,
                  derive_stream(np.seed, 3));

      NetworkGraph g = build_graph(st.wires, st.junctions, {domain.x0, domain.x1});
      const double band = 2.0;

      DisjointSet dsu(static_cast<std::size_t>(g.node_count));
      for (const GraphEdge& e : g.edges) dsu.unite(e.u, e.v);

      auto stripe_nodes = [&](const std::pair<double, double>& lx, double y0, double y1) {
        Rect rect{lx.first, y0, lx.second, y1};
        return nodes_in_rect(g, rect);
      };
      auto connected_sets = [&](const std::vector<int>& a, const std::vector<int>& b) {
        std::set<int> roots;
        for (int na : a) roots.insert(dsu.find(na));
        for (int nb : b)
          if (roots.count(dsu.find(nb))) return true;
        return false;
      };

      bool all_lines = true;
      for (const auto& lx : lines) {
        std::vector<int> bottom = stripe_nodes(lx, domain.y0, domain.y0 + band);
        std::vector<int> top = stripe_nodes(lx, domain.y1 - band, domain.y1);
        if (bottom.empty() || top.empty() || !connected_sets(bottom, top)) {
          all_lines = false;
          break;
        }
      }
      perc_ok[r] = all_lines;

      // Inter-line insulation for the middle adjacent pair.
      bool insul = true;
      if (lines.size() >= 2) {
        std::size_t mid = lines.size() / 2 - (lines.size() / 2 + 1 == lines.size() ? 1 : 0);
        Rect full_a{lines[mid].first, domain.y0, lines[mid].second, domain.y1};
        Rect full_b{lines[mid + 1].first, domain.y0, lines[mid + 1].second, domain.y1};
        std::vector<int> a = nodes_in_rect(g, full_a);
        std::vector<int> b = nodes_in_rect(g, full_b);
        if (!a.empty() && !b.empty()) {
          double r_between = solve_between(g, ctx.electrical, a, b);
          double r_along = solve_between(
              g, ctx.electrical, stripe_nodes(lines[mid], domain.y0, domain.y0 + band),
              stripe_nodes(lines[mid], domain.y1 - band, domain.y1));
          if (std::isfinite(r_between))
            insul = std::isfinite(r_along) && r_between / r_along > cfg.insulation_threshold;
        }
      }
      insul_ok[r] = insul;
    });

    ResolutionRow row;
    row.linewidth_um = lw;
    row.replicas = cfg.replicas;
    int np = 0, ni = 0;
    for (int r = 0; r < cfg.replicas; ++r) {
      np += perc_ok[r];
      ni += insul_ok[r];
    }
    row.percolation_probability = static_cast<double>(np) / cfg.replicas;
    row.insulation_pass_fraction = static_cast<double>(ni) / cfg.replicas;
    row.pass = row.percolation_probability >= 0.95 && row.insulation_pass_fraction >= 0.95;
    rows.push_back(row);
  }
  return rows;
}

} // namespace nwpat
