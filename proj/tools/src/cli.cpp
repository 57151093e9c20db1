#include "ccm_cli/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ccm/error.hpp"
#include "ccm/metric.hpp"
#include "ccm/random.hpp"
#include "ccm/stockyard.hpp"
#include "ccm/ugs.hpp"
#include "ccm_cli/config.hpp"
#include "json.hpp"

namespace ccm::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rounds to 12 significant digits so JSON output matches the CSV precision.
double num(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

json point(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || errno != 0 || !std::isfinite(v)) {
      throw ConfigError("bad number '" + item + "' in " + flag);
    }
    out.push_back(v);
  }
  if (expected != 0 && out.size() != expected) {
    throw ConfigError(flag + " expects " + std::to_string(expected) + " comma-separated numbers");
  }
  if (out.empty()) throw ConfigError(flag + " needs at least one number");
  return out;
}

Complex parse_z(const std::string& s, const std::string& flag) {
  const auto v = parse_list(s, 2, flag);
  return {v[0], v[1]};
}

BoundaryPoint parse_p(const std::string& s, const std::string& flag) {
  const auto v = parse_list(s, 3, flag);
  return {{v[0], v[1]}, v[2]};
}

Rect parse_window(const std::string& s) {
  const auto v = parse_list(s, 4, "--window");
  const Rect w{v[0], v[1], v[2], v[3]};
  if (!(w.x1 > w.x0 && w.y1 > w.y0)) throw ConfigError("--window must have x1 > x0 and y1 > y0");
  return w;
}

std::vector<double> parse_deltas(const std::string& s) {
  auto v = parse_list(s, 0, "--deltas");
  for (double d : v) {
    if (!(d > 0.0)) throw ConfigError("--deltas entries must be > 0");
  }
  return v;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> eval_budget;
  std::optional<double> delta0;
  std::string format;
  std::string output;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON run configuration (schema cc1)");
    cmd->add_option("--seed", seed, "Random seed (overrides config)");
    cmd->add_option("--eval-budget", eval_budget, "Mass evaluations per optimizer call (overrides config)");
    cmd->add_option("--delta0", delta0, "UGS threshold delta0 (overrides config)");
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", output, "Output file (default: standard output)");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? parse_config(R"({"schema":"cc1"})", ".") : load_config(config);
    if (seed) cfg.seed = *seed;
    if (eval_budget) {
      if (*eval_budget < 1) throw ConfigError("--eval-budget must be >= 1");
      cfg.eval_budget = *eval_budget;
    }
    if (delta0) {
      if (!(*delta0 > 0.0)) throw ConfigError("--delta0 must be > 0");
      cfg.delta0 = *delta0;
    }
    if (!format.empty()) cfg.format = format == "json" ? Format::Json : Format::Csv;
    if (!output.empty()) cfg.output = output;
    return cfg;
  }
};

MetricContext make_context(const RunConfig& cfg, int m = 2) {
  MetricOptions o;
  o.delta0 = cfg.delta0;
  o.m = m;
  o.lambda.eval_budget = cfg.eval_budget;
  o.lambda.seed = cfg.seed;
  o.lambda.mc_samples = 0;
  return MetricContext(cfg.field, o);
}

json bounds_rows(const std::vector<LambdaBounds>& rows) {
  json a = json::array();
  for (const auto& b : rows) a.push_back({{"delta", num(b.delta)}, {"lower", num(b.lower)}, {"upper", num(b.upper)}});
  return a;
}

json pen_json(const Pen& p) {
  json j;
  if (p.shape() == Pen::Shape::Disc) {
    j["shape"] = "disc";
    j["center"] = point(p.as_disc().center);
    j["radius"] = num(p.as_disc().radius);
  } else {
    j["shape"] = "polygon";
    json v = json::array();
    for (Complex z : p.vertices()) v.push_back(point(z));
    j["vertices"] = v;
  }
  j["count"] = p.count();
  j["perimeter"] = num(p.perimeter());
  return j;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidControl:
    case ErrorCode::DegeneratePolygon:
    case ErrorCode::OutOfCylinder:
    case ErrorCode::HessianUnbounded:
    case ErrorCode::UnsupportedOrder:
      return kExitConfig;
    default:
      return kExitNumeric;
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Carnot-Caratheodory metric estimates on model hypersurfaces Im z2 = P(z1)", "ccm"};
  app.set_version_flag("--version", CCM_VERSION);
  app.require_subcommand(1);

  std::ostringstream body;
  RunConfig cfg;
  std::function<void()> action;

  // lambda
  Common c_lambda;
  std::string l_z0 = "0,0", l_deltas;
  int l_mc = 32;
  auto* lambda = app.add_subcommand("lambda", "Lower/upper bounds for Lambda(z0, delta)");
  c_lambda.attach(lambda);
  lambda->add_option("--z0", l_z0, "Base point x,y");
  lambda->add_option("--deltas", l_deltas, "Comma-separated deltas")->required();
  lambda->add_option("--mc-samples", l_mc, "Random controls tried per delta")->check(CLI::NonNegativeNumber);
  lambda->callback([&] {
    action = [&] {
      cfg = c_lambda.resolve();
      LambdaOptions o;
      o.eval_budget = cfg.eval_budget;
      o.mc_samples = l_mc;
      o.seed = cfg.seed;
      const auto deltas = parse_deltas(l_deltas);
      const auto rows = lambda_sweep(cfg.field, parse_z(l_z0, "--z0"), deltas, o);
      if (cfg.format == Format::Json) {
        body << json{{"z0", point(parse_z(l_z0, "--z0"))}, {"rows", bounds_rows(rows)}}.dump(2) << '\n';
      } else {
        body << "delta[z],lambda_lower[t],lambda_upper[t]\n";
        for (const auto& b : rows) body << fmt(b.delta) << ',' << fmt(b.lower) << ',' << fmt(b.upper) << '\n';
      }
    };
  });

  // stockyard
  Common c_yard;
  std::string y_z0 = "0,0", y_strategy = "best";
  double y_delta = 0.0;
  auto* yard = app.add_subcommand("stockyard", "Best stockyard found at (z0, delta), as JSON");
  c_yard.attach(yard);
  yard->add_option("--z0", y_z0, "Anchor x,y");
  yard->add_option("--delta", y_delta, "Fencing budget")->required()->check(CLI::PositiveNumber);
  yard->add_option("--strategy", y_strategy, "Optimizer strategy")
      ->check(CLI::IsMember({"single_circle", "disc_chain", "greedy_multi", "best"}));
  yard->callback([&] {
    action = [&] {
      cfg = c_yard.resolve();
      const Complex z0 = parse_z(y_z0, "--z0");
      const OptimizeResult r = optimize(cfg.field, z0, y_delta, *parse_strategy(y_strategy), cfg.eval_budget, cfg.seed);
      const double upper = std::max(upper_bound(cfg.field, z0, y_delta, default_c2(cfg.field, y_delta)), r.value);
      json pens = json::array();
      for (const Pen& p : r.stockyard.pens) pens.push_back(pen_json(p));
      body << json{{"anchor", point(z0)},
                   {"delta", num(y_delta)},
                   {"strategy", std::string(to_string(r.strategy))},
                   {"value", num(r.value)},
                   {"fencing", num(r.stockyard.fencing())},
                   {"bounds", {{"lower", num(r.value)}, {"upper", num(upper)}}},
                   {"pens", pens}}
                  .dump(2)
           << '\n';
    };
  });

  // twist
  Common c_twist;
  std::string t_z0 = "0,0", t_control, t_orient = "cw";
  double t_t0 = 0.0, t_delta = 0.0;
  int t_circle = 0;
  auto* tw = app.add_subcommand("twist", "Endpoint and twist of a piecewise constant control");
  c_twist.attach(tw);
  tw->add_option("--z0", t_z0, "Start point x,y");
  tw->add_option("--t0", t_t0, "Start height t");
  tw->add_option("--delta", t_delta, "Scale delta")->required()->check(CLI::PositiveNumber);
  auto* ctl = tw->add_option("--control", t_control, "Control file: JSON rows [s, alpha, beta]");
  auto* circ = tw->add_option("--circle", t_circle, "Use the regular K-gon control instead")->check(CLI::Range(3, 1 << 20));
  ctl->excludes(circ);
  tw->add_option("--orientation", t_orient, "Orientation of --circle")->check(CLI::IsMember({"cw", "ccw"}));
  tw->callback([&] {
    action = [&] {
      cfg = c_twist.resolve();
      if (t_control.empty() && t_circle == 0) throw ConfigError("twist needs --control or --circle");
      const ControlPair u = t_control.empty()
                                ? circle_control(t_circle, t_orient == "cw" ? Orientation::Clockwise
                                                                            : Orientation::CounterClockwise)
                                : load_control(t_control);
      const BoundaryPoint p0{parse_z(t_z0, "--z0"), t_t0};
      const BoundaryPoint p1 = integrate_flow(cfg.field, p0, t_delta, u);
      const double tw_val = p1.t - p0.t;
      const double len = path_length(u, t_delta);
      if (cfg.format == Format::Json) {
        body << json{{"end", {{"x", num(p1.z.real())}, {"y", num(p1.z.imag())}, {"t", num(p1.t)}}},
                     {"twist", num(tw_val)},
                     {"length", num(len)}}
                    .dump(2)
             << '\n';
      } else {
        body << "x[z],y[z],t[t],twist[t],length[z]\n"
             << fmt(p1.z.real()) << ',' << fmt(p1.z.imag()) << ',' << fmt(p1.t) << ',' << fmt(tw_val) << ','
             << fmt(len) << '\n';
      }
    };
  });

  // decompose
  Common c_dec;
  std::string d_loop;
  auto* dec = app.add_subcommand("decompose", "Split a closed polygonal loop into simple cycles with signed masses");
  c_dec.attach(dec);
  dec->add_option("--loop", d_loop, "Loop file: JSON list of [x, y]")->required();
  dec->callback([&] {
    action = [&] {
      cfg = c_dec.resolve();
      const PolyLoop loop = load_loop(d_loop);
      const PolyLoop refined = refine_intersections(loop);
      const auto cycles = decompose(refined);
      json arr = json::array();
      double total = 0.0;
      for (const SimpleCycle& c : cycles) {
        const double m = signed_mass(cfg.field, c);
        total += m;
        json verts = json::array(), prov = json::array();
        for (Complex z : c.vertices) verts.push_back(point(z));
        for (const ParamInterval& iv : c.provenance) prov.push_back({num(iv.begin), num(iv.end)});
        arr.push_back({{"orientation", c.orientation == Orientation::Clockwise ? "cw" : "ccw"},
                       {"signed_mass", num(m)},
                       {"length", num(c.length())},
                       {"vertices", verts},
                       {"provenance", prov}});
      }
      body << json{{"loop_integral", num(loop_integral(cfg.field, loop))},
                   {"sum_signed_mass", num(total)},
                   {"refined_vertices", refined.size()},
                   {"cycles", arr}}
                  .dump(2)
           << '\n';
    };
  });

  // ugs-check
  Common c_ugs;
  std::string u_window, u_deltas, u_table;
  int u_grid = 3, u_mc = 0;
  auto* ugs = app.add_subcommand("ugs-check", "Density conditions and Lambda growth fit over a window");
  c_ugs.attach(ugs);
  ugs->add_option("--window", u_window, "Sampling window x0,y0,x1,y1")->required();
  ugs->add_option("--deltas", u_deltas, "Deltas for the fit (default delta0 * 1,2,4,8,16)");
  ugs->add_option("--grid-n", u_grid, "Samples per window side")->check(CLI::Range(1, 64));
  ugs->add_option("--mc-samples", u_mc, "Random controls per estimate")->check(CLI::NonNegativeNumber);
  ugs->add_option("--table", u_table, "Also write the f table as CSV to this file");
  ugs->callback([&] {
    action = [&] {
      cfg = c_ugs.resolve();
      const Rect w = parse_window(u_window);
      std::vector<double> deltas;
      if (u_deltas.empty()) {
        for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) deltas.push_back(f * cfg.delta0);
      } else {
        deltas = parse_deltas(u_deltas);
      }
      UgsOptions o;
      o.grid_n = u_grid;
      o.delta0 = cfg.delta0;
      o.mc_samples = u_mc;
      const UgsReport r = fit_ugs(cfg.field, w, deltas, cfg.eval_budget, cfg.seed, o);
      std::ostringstream table;
      table << "delta[z],lambda_lower[t],lambda_upper[t]\n";
      for (const auto& b : r.f_table) table << fmt(b.delta) << ',' << fmt(b.lower) << ',' << fmt(b.upper) << '\n';
      body << json{{"c1", num(r.c1)},
                   {"c2", num(r.c2)},
                   {"avg_ratio_lo", num(r.avg_ratio_lo)},
                   {"avg_ratio_hi", num(r.avg_ratio_hi)},
                   {"density_bounded", r.density_bounded},
                   {"averages_ok", r.averages_ok},
                   {"exponent", num(r.exponent)},
                   {"prefactor", num(r.prefactor)},
                   {"residual", num(r.residual)},
                   {"spread", num(r.spread)},
                   {"verdict", std::string(to_string(r.verdict))},
                   {"grid_n", r.grid_n},
                   {"delta0", num(r.delta0)},
                   {"f_table", bounds_rows(r.f_table)}}
                  .dump(2)
           << '\n';
      if (!u_table.empty()) {
        std::ofstream f(u_table);
        if (!f) throw ConfigError("cannot write " + u_table);
        f << table.str();
      }
    };
  });

  // dist
  Common c_dist;
  std::string p_0, p_1;
  bool use_sqrt = false;
  int m_order = 2;
  auto* dist = app.add_subcommand("dist", "Estimated CC distance between two boundary points");
  c_dist.attach(dist);
  dist->add_option("--p0", p_0, "First point x,y,t")->required();
  dist->add_option("--p1", p_1, "Second point x,y,t")->required();
  dist->add_flag("--sqrt", use_sqrt, "Use |dz| + sqrt|dt| after normalization (quadratic only)");
  dist->add_option("--m", m_order, "Taylor order of the small-scale shear")->check(CLI::Range(1, 6));
  dist->callback([&] {
    action = [&] {
      cfg = c_dist.resolve();
      const MetricContext ctx = make_context(cfg, m_order);
      const BoundaryPoint a = parse_p(p_0, "--p0"), b = parse_p(p_1, "--p1");
      const double d = use_sqrt ? distance_sqrt(ctx, a, b) : distance(ctx, a, b);
      if (cfg.format == Format::Json) {
        body << json{{"distance", num(d)}, {"form", use_sqrt ? "sqrt" : "mu"}}.dump(2) << '\n';
      } else {
        body << "distance[z]\n" << fmt(d) << '\n';
      }
    };
  });

  // cyl
  Common c_cyl;
  std::string cy_p0 = "0,0,0";
  double cy_delta = 0.0, cy_r = 0.5;
  int cy_samples = 100;
  auto* cyl = app.add_subcommand("cyl", "Sample Cyl(p0, r delta) and test reachability within delta");
  c_cyl.attach(cyl);
  cyl->add_option("--p0", cy_p0, "Base point x,y,t");
  cyl->add_option("--delta", cy_delta, "Ball radius delta")->required()->check(CLI::PositiveNumber);
  cyl->add_option("--samples", cy_samples, "Number of sampled points")->check(CLI::Range(1, 1000000));
  cyl->add_option("--radius-factor", cy_r, "Cylinder scale r")->check(CLI::Range(1e-6, 1.0));
  cyl->callback([&] {
    action = [&] {
      cfg = c_cyl.resolve();
      const MetricContext ctx = make_context(cfg);
      const BoundaryPoint p0 = parse_p(cy_p0, "--p0");
      const double inner = cy_r * cy_delta;
      const double f = ctx.lambda_lower(p0.z, inner);
      Rng rng(cfg.seed);
      json rows = json::array();
      if (cfg.format == Format::Csv) body << "a,b,c,x[z],y[z],t[t],reached\n";
      for (int k = 0; k < cy_samples; ++k) {
        const Complex ab = rng.in_unit_disc();
        const double c = rng.uniform(-1.0, 1.0);
        const BoundaryPoint q = cylinder_point(ctx, p0, inner, f, ab.real(), ab.imag(), c);
        const bool ok = reach_check(ctx, p0, q, cy_delta);
        if (cfg.format == Format::Csv) {
          body << fmt(ab.real()) << ',' << fmt(ab.imag()) << ',' << fmt(c) << ',' << fmt(q.z.real()) << ','
               << fmt(q.z.imag()) << ',' << fmt(q.t) << ',' << (ok ? 1 : 0) << '\n';
        } else {
          rows.push_back({{"a", num(ab.real())}, {"b", num(ab.imag())}, {"c", num(c)},
                          {"point", {num(q.z.real()), num(q.z.imag()), num(q.t)}}, {"reached", ok}});
        }
      }
      if (cfg.format == Format::Json) {
        body << json{{"delta", num(cy_delta)}, {"radius_factor", num(cy_r)}, {"f_delta", num(f)}, {"samples", rows}}
                    .dump(2)
             << '\n';
      }
    };
  });

  // volume
  Common c_vol;
  std::string v_z0 = "0,0", v_deltas;
  auto* vol = app.add_subcommand("volume", "Ball volume estimate delta^2 Lambda");
  c_vol.attach(vol);
  vol->add_option("--z0", v_z0, "Base point x,y");
  vol->add_option("--deltas", v_deltas, "Comma-separated deltas")->required();
  vol->callback([&] {
    action = [&] {
      cfg = c_vol.resolve();
      const MetricContext ctx = make_context(cfg);
      const Complex z0 = parse_z(v_z0, "--z0");
      std::vector<VolumeEstimate> rows;
      for (double d : parse_deltas(v_deltas)) rows.push_back(ball_volume(ctx, z0, d));
      if (cfg.format == Format::Json) {
        json a = json::array();
        for (const auto& v : rows) a.push_back({{"delta", num(v.delta)}, {"lower", num(v.lower)}, {"upper", num(v.upper)}});
        body << json{{"z0", point(z0)}, {"rows", a}}.dump(2) << '\n';
      } else {
        body << "delta[z],volume_lower[z^2*t],volume_upper[z^2*t]\n";
        for (const auto& v : rows) body << fmt(v.delta) << ',' << fmt(v.lower) << ',' << fmt(v.upper) << '\n';
      }
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CCM_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: ConfigError: " << one_line(e.what()) << '\n';
    return kExitConfig;
  }

  try {
    action();
    if (cfg.output.empty()) {
      out << body.str();
    } else {
      std::ofstream f(cfg.output);
      if (!f) throw ConfigError("cannot write " + cfg.output);
      f << body.str();
    }
  } catch (const ConfigError& e) {
    err << "error: ConfigError: " << one_line(e.what()) << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: Internal: " << one_line(e.what()) << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace ccm::cli
