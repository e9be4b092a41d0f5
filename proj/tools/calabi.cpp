#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calabi/bundles.hpp"
#include "calabi/construction.hpp"
#include "calabi/csv.hpp"
#include "calabi/errors.hpp"
#include "calabi/flow.hpp"
#include "calabi/levelset.hpp"
#include "calabi/stability.hpp"
#include "calabi/svg.hpp"

namespace {

constexpr int kExitSolve = 2;      // NotKahler / NoRoot and kin
constexpr int kExitBlowUp = 3;     // flow curvature blow-up
constexpr int kExitEscape = 4;     // bundle arm escapes the window
constexpr int kExitUsage = 64;     // bad flags / config
constexpr int kExitIo = 74;        // file errors

using calabi::format_double;

// Output files land next to the cwd unless CALABI_OUT_DIR overrides.
std::filesystem::path out_path(const std::string& name) {
  if (const char* dir = std::getenv("CALABI_OUT_DIR"); dir && *dir)
    return std::filesystem::path(dir) / name;
  return std::filesystem::path(name);
}

std::ofstream open_out(const std::string& name) {
  const auto path = out_path(name);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  return out;
}

// key = value lines, # comments; applied as defaults before flags.
std::vector<std::string> config_args(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::ios_base::failure("cannot read config file " + file);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::ios_base::failure("config line without a key: " + line);
    args.push_back("--" + key);
    if (!value.empty()) args.push_back(value);
  }
  return args;
}

std::string verdict_name(calabi::Locus v) {
  switch (v) {
    case calabi::Locus::Stable: return "Stable";
    case calabi::Locus::Unstable: return "Unstable";
    default: return "Wall";
  }
}

void write_branch_csv(std::ostream& os, const std::vector<calabi::Branch>& comps) {
  calabi::CsvWriter w(os);
  w.header({"component", "x", "y"});
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (const auto& p : comps[c].points)
      w.add(static_cast<long long>(c)).add(p.x).add(p.y).end_row();
}

void write_levelset_svg(std::ostream& os, const calabi::HarmonicLevelSet& s,
                        const std::vector<calabi::Branch>& comps,
                        const calabi::Window& win) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::vector<calabi::SvgSeries> series;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    calabi::SvgSeries ser;
    ser.points = comps[c].points;
    ser.color = palette[c % 8];
    ser.closed = comps[c].is_closed;
    series.push_back(std::move(ser));
  }
  calabi::SvgOptions opts;
  opts.x_min = win.x_min;
  opts.x_max = win.x_max;
  opts.y_min = win.y_min;
  opts.y_max = win.y_max;
  std::ostringstream title;
  title << "level set n=" << s.n << " theta=" << s.theta_hat << " c=" << s.c;
  opts.title = title.str();
  calabi::write_svg_plot(os, series, opts);
}

struct DegreeFlag {
  bool degrees = false;
  double rad(double v) const { return degrees ? v * std::numbers::pi / 180.0 : v; }
};

int cmd_params(int n, std::optional<double> theta, std::optional<double> p,
               std::optional<int> m, long long max_den, const std::string& out_csv,
               const std::vector<double>& scan_ps) {
  using namespace calabi;
  ConstructionParams cp = p ? ConstructionParams::from_p(n, *p)
                          : (m ? ConstructionParams::from_theta(n, *theta, *m)
                               : ConstructionParams::from_theta(n, *theta));
  std::cout << "n = " << cp.n << "\n"
            << "branch_m = " << cp.m_branch << "\n"
            << "theta_hat = " << format_double(cp.theta_hat) << "\n"
            << "c = " << format_double(cp.c) << "\n"
            << "q = " << format_double(cp.q) << "\n"
            << "a = " << format_double(cp.a) << "\n"
            << "p = " << format_double(cp.p) << "\n"
            << "ap = " << format_double(cp.a * cp.p) << "\n"
            << "ratio_ap_over_q = " << format_double(cp.a * cp.p / cp.q) << "\n";
  if (const auto k = find_admissible_k(cp, max_den)) {
    std::cout << "admissible = yes\n"
              << "k = " << format_double(k->k) << "\n"
              << "kq = " << format_double(k->kq) << "\n"
              << "kap = " << format_double(k->kap) << "\n";
  } else {
    std::cout << "admissible = no (denominator bound " << max_den << ")\n";
  }
  if (!scan_ps.empty()) {
    const RationalityReport rep = rationality_scan(n, scan_ps, max_den);
    auto os = open_out(out_csv);
    CsvWriter w(os);
    w.header({"p", "theta", "a", "q", "ratio", "rational_num", "rational_den",
              "admissible_k"});
    for (const auto& row : rep.rows) {
      w.add(row.p).add(row.theta).add(row.a).add(row.q).add(row.ratio);
      w.add(row.rational_num).add(row.rational_den).add(row.admissible_k).end_row();
    }
    std::cout << "scan_rows = " << rep.rows.size() << "\n"
              << "edge_divergence_left = " << (rep.edge_divergence_left ? "yes" : "no")
              << "\n"
              << "edge_divergence_right = " << (rep.edge_divergence_right ? "yes" : "no")
              << "\n"
              << "small_p_ratio = " << format_double(rep.small_p_ratio) << "\n"
              << "scan_csv = " << out_path(out_csv).string() << "\n";
  }
  return 0;
}

int cmd_levelset(int n, double theta, double c, const calabi::Window& win,
                 const std::string& out_csv, const std::string& out_svg, int seed_grid) {
  using namespace calabi;
  const HarmonicLevelSet s{n, theta, c};
  const auto comps = collect_components(s, win, seed_grid);
  std::cout << "components = " << comps.size() << "\n";
  std::size_t n_tangents = 0, n_closed = 0, n_singular = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Branch& br = comps[i];
    n_tangents += br.vertical_tangent_points.size();
    n_closed += br.is_closed ? 1 : 0;
    n_singular += (br.singular_at_front || br.singular_at_back) ? 1 : 0;
    std::cout << "component " << i << ": points=" << br.points.size()
              << (br.is_closed ? " closed" : " open");
    if (br.singular_at_front || br.singular_at_back) std::cout << " singular-end";
    for (const auto idx : br.vertical_tangent_points)
      std::cout << " tangent@(" << format_double(br.points[idx].x) << ","
                << format_double(br.points[idx].y) << ")";
    std::cout << "\n";
  }
  std::cout << "vertical_tangents = " << n_tangents << "\n"
            << "closed_components = " << n_closed << "\n"
            << "singular_components = " << n_singular << "\n";
  if (!out_csv.empty()) {
    auto os = open_out(out_csv);
    write_branch_csv(os, comps);
    std::cout << "csv = " << out_path(out_csv).string() << "\n";
  }
  if (!out_svg.empty()) {
    auto os = open_out(out_svg);
    write_levelset_svg(os, s, comps, win);
    std::cout << "svg = " << out_path(out_svg).string() << "\n";
  }
  return 0;
}

int cmd_wall(int n, std::optional<double> theta, std::optional<double> p, double b_min,
             double b_max, int steps, bool bridgeland, const std::string& out_csv) {
  using namespace calabi;
  const ConstructionParams cp =
      p ? ConstructionParams::from_p(n, *p) : ConstructionParams::from_theta(n, *theta);
  if (bridgeland && n != 3)
    throw CLI::ValidationError("--bridgeland", "charge correction columns need n = 3");
  const auto [L1, L2] = section_classes(cp);
  const double eps = std::max(0.05, 1.05 * std::max(std::abs(b_min - 1.0),
                                                    std::abs(b_max - 1.0)));
  const BridgelandData3 data = bridgeland ? BridgelandData3::for_kahler(cp.a)
                                          : BridgelandData3{};

  auto os = open_out(out_csv);
  CsvWriter w(os);
  std::vector<std::string> cols = {"b",       "ReZ1",    "ImZ1",    "ReZ2",
                                   "ImZ2",    "lambda1", "lambda2", "verdict"};
  if (bridgeland) {
    cols.insert(cols.end(), {"ReZG1", "ImZG1", "ReZG2", "ImZG2"});
  }
  w.header(cols);
  for (int i = 0; i < steps; ++i) {
    const double b = steps == 1 ? b_min : b_min + (b_max - b_min) * i / (steps - 1);
    const KahlerClassBlowup om{cp.a, b};
    const CentralCharge Z1 = central_charge(n, om, L1);
    const CentralCharge Z2 = central_charge(n, om, L2);
    const double l1 = z_slope(Z1);
    const double l2 = z_slope(Z2);
    const Locus v = classify_locus(cp, b, eps);
    w.add(b).add(Z1.real()).add(Z1.imag()).add(Z2.real()).add(Z2.imag());
    w.add(l1).add(l2).add(verdict_name(v));
    if (bridgeland) {
      const CentralCharge corr1{data.gamma_dot_H * L1.h + data.gamma_dot_E * L1.e, 0};
      const CentralCharge corr2{data.gamma_dot_H * L2.h + data.gamma_dot_E * L2.e, 0};
      const CentralCharge G1 = Z1 + corr1, G2 = Z2 + corr2;
      w.add(G1.real()).add(G1.imag()).add(G2.real()).add(G2.imag());
    }
    w.end_row();
  }
  std::cout << "rows = " << steps << "\n"
            << "csv = " << out_path(out_csv).string() << "\n";
  return 0;
}

void write_flow_log(const std::string& name, const calabi::FlowReport& flow,
                    double barrier_tol) {
  auto os = open_out(name);
  calabi::CsvWriter w(os);
  w.header({"t", "x_c", "y_c", "max_speed", "barrier_ok"});
  for (const auto& rec : flow.history) {
    const bool ok = rec.barrier_upper >= -barrier_tol && rec.barrier_lower >= -barrier_tol;
    w.add(rec.t).add(rec.x_c).add(rec.y_c).add(rec.sup_velocity);
    w.add(std::string(ok ? "1" : "0")).end_row();
  }
}

void write_curve_csv(const std::string& name, const std::vector<calabi::PlanePoint>& pts) {
  auto os = open_out(name);
  calabi::CsvWriter w(os);
  w.header({"x", "y"});
  for (const auto& p : pts) w.add(p.x).add(p.y).end_row();
}

int cmd_flow(const std::string& params_file, double b, double t_max, double dt,
             int curve_points, int record_every, const std::string& prefix,
             int snapshot_every, const DegreeFlag& deg) {
  using namespace calabi;
  // Construction parameters come from a key = value file (n and theta or p).
  int n = 2;
  std::optional<double> theta, p;
  {
    const auto args = config_args(params_file);
    for (std::size_t i = 0; i + 1 < args.size(); i += 2) {
      const std::string key = args[i];
      double value = 0;
      try {
        value = std::stod(args[i + 1]);
      } catch (const std::exception&) {
        throw std::ios_base::failure("bad numeric value in params file: " + args[i + 1]);
      }
      if (key == "--n")
        n = static_cast<int>(value);
      else if (key == "--theta")
        theta = value;
      else if (key == "--p")
        p = value;
      else
        throw std::ios_base::failure("unknown key in params file: " + key.substr(2));
    }
  }
  if (!theta && !p)
    throw std::ios_base::failure("params file must set theta or p");
  if (theta) theta = deg.rad(*theta);

  ExperimentConfig cfg;
  cfg.n = n;
  const ConstructionParams cp =
      p ? ConstructionParams::from_p(n, *p) : ConstructionParams::from_theta(n, *theta);
  cfg.theta_hat = cp.theta_hat;
  cfg.b = b;
  cfg.t_max = t_max;
  cfg.flow.dt = dt;
  cfg.curve_points = curve_points;
  cfg.record_every = record_every;

  int snap_count = 0, snap_written = 0;
  if (snapshot_every > 0) {
    cfg.on_record = [&](const CurveState& st) {
      if (snap_count++ % snapshot_every != 0) return;
      std::ostringstream name;
      name << prefix << "_snap_" << std::setw(4) << std::setfill('0') << snap_written
           << ".csv";
      write_curve_csv(name.str(), st.pts);
      ++snap_written;
    };
  }

  ExperimentReport rep = unstable_limit_experiment(cfg);
  const bool blew_up = rep.flow.status == FlowStatus::BlewUp;

  write_flow_log(prefix + "_log.csv", rep.flow, rep.barrier_tol);
  if (rep.flow.curve) write_curve_csv(prefix + "_final.csv", rep.flow.curve->pts);
  write_curve_csv(prefix + "_barrier_upper.csv", rep.barrier_upper.samples);
  write_curve_csv(prefix + "_barrier_lower.csv", rep.barrier_lower.samples);

  const char* status = rep.flow.status == FlowStatus::Converged    ? "converged"
                       : rep.flow.status == FlowStatus::TMaxReached ? "t_max"
                                                                     : "blow_up";
  std::cout << "status = " << status << "\n"
            << "t_final = " << format_double(rep.flow.t_final) << "\n"
            << "x_inf = " << format_double(rep.x_inf) << "\n"
            << "y_inf = " << format_double(rep.y_inf) << "\n"
            << "vertex_moved_left = " << (rep.vertex_moved_left ? "yes" : "no") << "\n"
            << "barriers_respected = " << (rep.barriers_respected ? "yes" : "no") << "\n"
            << "final_dist_upper = " << format_double(rep.final_dist_upper) << "\n"
            << "final_dist_lower = " << format_double(rep.final_dist_lower) << "\n"
            << "snapshots = " << snap_written << "\n"
            << "log = " << out_path(prefix + "_log.csv").string() << "\n";
  return blew_up ? kExitBlowUp : 0;
}

int cmd_bundle(int r, int m, double xi_re, double xi_im, double b, double max_den,
               const std::string& out_csv, const std::string& out_svg) {
  using namespace calabi;
  BundleParams params;
  params.r = r;
  params.m = m;
  params.xi = {xi_re, xi_im};
  params.b = b;
  const double psi = std::arg(params.xi);
  const auto thetas = vertical_branch_thetas(m, r, psi);
  std::cout << "psi = " << format_double(psi) << "\n";
  for (const double th : thetas)
    std::cout << "theta_hat = " << format_double(th) << " (mod pi)\n";
  params.theta_hat = thetas.front();

  const BoundaryIntersections bi = boundary_intersections(params, max_den);
  std::cout << "q = " << format_double(bi.q) << "\n"
            << "q_prime = " << format_double(bi.q_prime) << "\n";
  if (bi.q_rational)
    std::cout << "q_rational = " << bi.q_rational->num << "/" << bi.q_rational->den << "\n";
  else
    std::cout << "q_rational = none\n";
  if (bi.q_prime_rational)
    std::cout << "q_prime_rational = " << bi.q_prime_rational->num << "/"
              << bi.q_prime_rational->den << "\n";
  else
    std::cout << "q_prime_rational = none\n";
  const bool commensurable = bi.q_rational && bi.q_prime_rational;
  std::cout << "commensurable = " << (commensurable ? "yes" : "no") << "\n";

  const int sign_q = arg_monotonicity(params, bi.q);
  const int sign_qp = arg_monotonicity(params, bi.q_prime);
  std::cout << "monotonicity_at_q = " << sign_q << "\n"
            << "monotonicity_at_q_prime = " << sign_qp << "\n";

  if (!out_csv.empty()) {
    auto os = open_out(out_csv);
    CsvWriter w(os);
    w.header({"arm", "x", "y"});
    for (const auto& p : bi.arm_plus) w.add(0LL).add(p.x).add(p.y).end_row();
    for (const auto& p : bi.arm_minus) w.add(1LL).add(p.x).add(p.y).end_row();
    std::cout << "csv = " << out_path(out_csv).string() << "\n";
  }
  if (!out_svg.empty()) {
    std::vector<SvgSeries> series(2);
    series[0].points = bi.arm_plus;
    series[0].color = "#1f77b4";
    series[1].points = bi.arm_minus;
    series[1].color = "#d62728";
    SvgOptions opts;
    std::ostringstream title;
    title << "bundle arms r=" << r << " m=" << m;
    opts.title = title.str();
    auto os = open_out(out_svg);
    write_svg_plot(os, series, opts);
    std::cout << "svg = " << out_path(out_svg).string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Special Lagrangian multi-sections with Calabi symmetry: construction\n"
      "parameters, level sets, stability walls, momentum flow, split bundles.\n"
      "CSV columns use 17 significant digits. Schemas:\n"
      "  params --scan : p,theta,a,q,ratio,rational_num,rational_den,admissible_k\n"
      "  levelset      : component,x,y\n"
      "  wall          : b,ReZ1,ImZ1,ReZ2,ImZ2,lambda1,lambda2,verdict[,ReZG1,ImZG1,ReZG2,ImZG2]\n"
      "  flow log      : t,x_c,y_c,max_speed,barrier_ok\n"
      "  flow curves   : x,y\n"
      "  bundle        : arm,x,y"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file,
                 "key = value config file applied before flags (# comments)");

  DegreeFlag deg;
  app.add_flag("--degrees", deg.degrees, "interpret input angles as degrees");

  // params
  auto* sc_params = app.add_subcommand("params", "solve construction parameters");
  sc_params->fallthrough();
  int pa_n = 2;
  std::optional<double> pa_theta, pa_p;
  std::optional<int> pa_m;
  long long pa_maxden = 1000;
  std::string pa_out = "rationality.csv";
  std::vector<double> pa_scan;
  sc_params->add_option("--n", pa_n, "fibre dimension n >= 2")->required();
  auto* o_theta = sc_params->add_option("--theta", pa_theta, "phase in (0,pi), pi/2 excluded");
  auto* o_p = sc_params->add_option("--p", pa_p, "boundary slope parameter");
  o_theta->excludes(o_p);
  o_p->excludes(o_theta);
  sc_params->add_option("--m", pa_m, "branch index in [1-n, n-2]");
  sc_params->add_option("--max-den", pa_maxden, "denominator bound for admissibility");
  sc_params->add_option("--scan", pa_scan, "p values for a rationality scan CSV");
  sc_params->add_option("--out", pa_out, "scan CSV filename");

  // levelset
  auto* sc_level = app.add_subcommand("levelset", "trace level-set components");
  sc_level->fallthrough();
  int lv_n = 2, lv_grid = 24;
  double lv_theta = 0, lv_c = 0;
  calabi::Window lv_win{-4, 4, -4, 4};
  std::string lv_csv = "levelset.csv", lv_svg = "levelset.svg";
  sc_level->add_option("--n", lv_n)->required();
  sc_level->add_option("--theta", lv_theta)->required();
  sc_level->add_option("--c", lv_c)->required();
  sc_level->add_option("--xmin", lv_win.x_min);
  sc_level->add_option("--xmax", lv_win.x_max);
  sc_level->add_option("--ymin", lv_win.y_min);
  sc_level->add_option("--ymax", lv_win.y_max);
  sc_level->add_option("--grid", lv_grid, "seed grid per side");
  sc_level->add_option("--out-csv", lv_csv, "CSV filename (empty to skip)");
  sc_level->add_option("--out-svg", lv_svg, "SVG filename (empty to skip)");

  // wall
  auto* sc_wall = app.add_subcommand("wall", "scan charges and slopes across b");
  sc_wall->fallthrough();
  int wa_n = 2, wa_steps = 3;
  std::optional<double> wa_theta, wa_p;
  double wa_bmin = 0.99, wa_bmax = 1.01;
  bool wa_bridge = false;
  std::string wa_out = "wall.csv";
  sc_wall->add_option("--n", wa_n)->required();
  auto* w_theta = sc_wall->add_option("--theta", wa_theta);
  auto* w_p = sc_wall->add_option("--p", wa_p);
  w_theta->excludes(w_p);
  w_p->excludes(w_theta);
  sc_wall->add_option("--b-min", wa_bmin);
  sc_wall->add_option("--b-max", wa_bmax);
  sc_wall->add_option("--steps", wa_steps);
  sc_wall->add_flag("--bridgeland", wa_bridge, "append n=3 corrected-charge columns");
  sc_wall->add_option("--out", wa_out, "CSV filename");

  // flow
  auto* sc_flow = app.add_subcommand("flow", "run the momentum curve flow experiment");
  sc_flow->fallthrough();
  std::string fl_params, fl_prefix = "flow";
  double fl_b = 1.05, fl_tmax = 2.0, fl_dt = 0;
  int fl_points = 400, fl_record = 10, fl_snap = 50;
  sc_flow->add_option("--params-file", fl_params, "key = value file with n and theta or p")
      ->required();
  sc_flow->add_option("--b", fl_b, "Kahler parameter (b > 1 destabilizes)");
  sc_flow->add_option("--t-max", fl_tmax);
  sc_flow->add_option("--dt", fl_dt, "time step (<= 0 selects automatically)");
  sc_flow->add_option("--points", fl_points, "curve discretization points");
  sc_flow->add_option("--record-every", fl_record, "steps between log records");
  sc_flow->add_option("--snapshot-every", fl_snap, "records between curve snapshots (0 disables)");
  sc_flow->add_option("--prefix", fl_prefix, "output filename prefix");

  // bundle
  auto* sc_bundle = app.add_subcommand("bundle", "split-bundle boundary analysis");
  sc_bundle->fallthrough();
  int bu_r = 0, bu_m = 1;
  double bu_xire = 1, bu_xiim = 0, bu_b = 0.02, bu_maxden = 1e6;
  std::string bu_csv = "bundle.csv", bu_svg = "bundle.svg";
  sc_bundle->add_option("--r", bu_r, "r + 1 copies of O(-1)")->required();
  sc_bundle->add_option("--m", bu_m, "base dimension")->required();
  sc_bundle->add_option("--xi-re", bu_xire, "Re xi");
  sc_bundle->add_option("--xi-im", bu_xiim, "Im xi");
  sc_bundle->add_option("--b", bu_b, "boundary momentum")->required();
  sc_bundle->add_option("--max-den", bu_maxden, "denominator bound for q rationality");
  sc_bundle->add_option("--out-csv", bu_csv, "CSV filename (empty to skip)");
  sc_bundle->add_option("--out-svg", bu_svg, "SVG filename (empty to skip)");

  // Splice config-file entries in after the subcommand name; keys already
  // given on the command line are dropped from the file so flags win.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] != "--config") continue;
      const auto extra = config_args(args[i + 1]);
      args.erase(args.begin() + i, args.begin() + i + 2);
      std::vector<std::string> keep;
      for (std::size_t j = 0; j < extra.size();) {
        std::size_t k = j + 1;
        while (k < extra.size() && extra[k].rfind("--", 0) != 0) ++k;
        if (std::find(args.begin(), args.end(), extra[j]) == args.end())
          keep.insert(keep.end(), extra.begin() + j, extra.begin() + k);
        j = k;
      }
      args.insert(args.begin() + (args.empty() ? 0 : 1), keep.begin(), keep.end());
      break;
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sc_params->parsed()) {
      if (!pa_theta && !pa_p) {
        std::cerr << "error: params needs --theta or --p\n";
        return kExitUsage;
      }
      if (pa_theta) pa_theta = deg.rad(*pa_theta);
      return cmd_params(pa_n, pa_theta, pa_p, pa_m, pa_maxden, pa_out, pa_scan);
    }
    if (sc_level->parsed())
      return cmd_levelset(lv_n, deg.rad(lv_theta), lv_c, lv_win, lv_csv, lv_svg, lv_grid);
    if (sc_wall->parsed()) {
      if (!wa_theta && !wa_p) {
        std::cerr << "error: wall needs --theta or --p\n";
        return kExitUsage;
      }
      if (wa_theta) wa_theta = deg.rad(*wa_theta);
      return cmd_wall(wa_n, wa_theta, wa_p, wa_bmin, wa_bmax, wa_steps, wa_bridge, wa_out);
    }
    if (sc_flow->parsed())
      return cmd_flow(fl_params, fl_b, fl_tmax, fl_dt, fl_points, fl_record, fl_prefix,
                      fl_snap, deg);
    if (sc_bundle->parsed())
      return cmd_bundle(bu_r, bu_m, bu_xire, bu_xiim, bu_b, bu_maxden, bu_csv, bu_svg);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const calabi::BlowUp& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const calabi::BranchEscapesWindow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEscape;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const calabi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolve;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
