#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "calabi/bundles.hpp"
#include "calabi/construction.hpp"
#include "calabi/errors.hpp"
#include "calabi/flow.hpp"
#include "calabi/levelset.hpp"
#include "calabi/stability.hpp"

namespace py = pybind11;
using namespace calabi;

namespace {

std::vector<std::pair<double, double>> as_pairs(const std::vector<PlanePoint>& pts) {
  std::vector<std::pair<double, double>> v;
  v.reserve(pts.size());
  for (const auto& p : pts) v.emplace_back(p.x, p.y);
  return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level-set geometry, stability walls, and boundary flows for "
            "special Lagrangian multi-sections with Calabi symmetry";

  py::register_exception<Error>(m, "CalabiError");

  // ----------------------------------------------------------- geometry
  py::class_<Window>(m, "Window")
      .def(py::init([](double x_min, double x_max, double y_min, double y_max) {
             return Window{x_min, x_max, y_min, y_max};
           }),
           py::arg("x_min"), py::arg("x_max"), py::arg("y_min"), py::arg("y_max"))
      .def_readwrite("x_min", &Window::x_min)
      .def_readwrite("x_max", &Window::x_max)
      .def_readwrite("y_min", &Window::y_min)
      .def_readwrite("y_max", &Window::y_max);

  // ----------------------------------------------------------- level sets
  py::class_<HarmonicLevelSet>(m, "HarmonicLevelSet")
      .def(py::init([](int n, double theta_hat, double c) {
             return HarmonicLevelSet{n, theta_hat, c};
           }),
           py::arg("n"), py::arg("theta_hat"), py::arg("c"))
      .def_readwrite("n", &HarmonicLevelSet::n)
      .def_readwrite("theta_hat", &HarmonicLevelSet::theta_hat)
      .def_readwrite("c", &HarmonicLevelSet::c)
      .def("eval",
           [](const HarmonicLevelSet& s, double x, double y) { return s.eval({x, y}); },
           py::arg("x"), py::arg("y"));

  py::class_<Branch>(m, "Branch")
      .def_property_readonly("points",
                             [](const Branch& b) { return as_pairs(b.points); })
      .def_readonly("is_closed", &Branch::is_closed)
      .def_readonly("singular_at_front", &Branch::singular_at_front)
      .def_readonly("singular_at_back", &Branch::singular_at_back)
      .def_property_readonly("vertical_tangents", [](const Branch& b) {
        std::vector<std::pair<double, double>> v;
        for (auto i : b.vertical_tangent_points)
          v.emplace_back(b.points[i].x, b.points[i].y);
        return v;
      });

  m.def("collect_components", &collect_components, py::arg("level_set"), py::arg("window"),
        py::arg("seed_grid") = 24);
  m.def("solve_y_on_level", &solve_y_on_level, py::arg("level_set"), py::arg("x"),
        py::arg("y_guess"));
  m.def("ray_angles", &ray_angles, py::arg("level_set"));

  // ----------------------------------------------------------- construction
  py::class_<CriticalData>(m, "CriticalData")
      .def_readonly("c", &CriticalData::c)
      .def_readonly("q", &CriticalData::q);
  m.def("solve_critical_data", &solve_critical_data, py::arg("n"), py::arg("theta_hat"),
        py::arg("m"));
  m.def("solve_kahler_param", &solve_kahler_param, py::arg("n"), py::arg("theta_hat"),
        py::arg("m"));
  m.def("theta_from_p", &theta_from_p, py::arg("n"), py::arg("p"));
  m.def("p_from_theta", &p_from_theta, py::arg("n"), py::arg("theta_hat"));
  m.def("default_branch", &default_branch, py::arg("n"), py::arg("theta_hat"));

  py::class_<ConstructionParams>(m, "ConstructionParams")
      .def_static("from_theta",
                  py::overload_cast<int, double, int>(&ConstructionParams::from_theta),
                  py::arg("n"), py::arg("theta_hat"), py::arg("m"))
      .def_static("from_theta",
                  py::overload_cast<int, double>(&ConstructionParams::from_theta),
                  py::arg("n"), py::arg("theta_hat"))
      .def_static("from_p", &ConstructionParams::from_p, py::arg("n"), py::arg("p"))
      .def_readonly("n", &ConstructionParams::n)
      .def_readonly("m_branch", &ConstructionParams::m_branch)
      .def_readonly("theta_hat", &ConstructionParams::theta_hat)
      .def_readonly("c", &ConstructionParams::c)
      .def_readonly("q", &ConstructionParams::q)
      .def_readonly("a", &ConstructionParams::a)
      .def_readonly("p", &ConstructionParams::p)
      .def("level_set", &ConstructionParams::level_set);

  m.def("verify_same_component", &verify_same_component, py::arg("params"),
        py::arg("tol") = 1e-6);

  py::class_<AdmissibleScaling>(m, "AdmissibleScaling")
      .def_readonly("k", &AdmissibleScaling::k)
      .def_readonly("kq", &AdmissibleScaling::kq)
      .def_readonly("kap", &AdmissibleScaling::kap)
      .def_readonly("denominator_bound", &AdmissibleScaling::denominator_bound);
  m.def("find_admissible_k", &find_admissible_k, py::arg("params"),
        py::arg("max_denominator") = 1000000LL);
  m.def("admissible_params_scan", &admissible_params_scan, py::arg("n"),
        py::arg("max_denominator"), py::arg("max_count"));

  // ----------------------------------------------------------- stability
  py::class_<DivisorClass>(m, "DivisorClass")
      .def(py::init([](double h, double e) { return DivisorClass{h, e}; }), py::arg("h"),
           py::arg("e"))
      .def_readwrite("h", &DivisorClass::h)
      .def_readwrite("e", &DivisorClass::e);
  py::class_<KahlerClassBlowup>(m, "KahlerClassBlowup")
      .def(py::init([](double a, double b) { return KahlerClassBlowup{a, b}; }), py::arg("a"),
           py::arg("b"))
      .def_readwrite("a", &KahlerClassBlowup::a)
      .def_readwrite("b", &KahlerClassBlowup::b);

  m.def("intersection_product",
        [](int n, const std::vector<DivisorClass>& classes) {
          return intersection_product(n, classes);
        },
        py::arg("n"), py::arg("classes"));
  m.def("central_charge", &central_charge, py::arg("n"), py::arg("omega"), py::arg("L"));
  m.def("surrogate_charge", &surrogate_charge, py::arg("n"), py::arg("omega"), py::arg("L"));
  m.def("z_slope", &z_slope, py::arg("Z"), py::arg("tol") = 1e-12);
  m.def("section_classes", &section_classes, py::arg("params"));
  m.def("slope_derivative_at_wall", &slope_derivative_at_wall, py::arg("params"));

  py::enum_<Locus>(m, "Locus")
      .value("Stable", Locus::Stable)
      .value("Unstable", Locus::Unstable)
      .value("Wall", Locus::Wall);
  m.def("classify_locus", &classify_locus, py::arg("params"), py::arg("b"),
        py::arg("eps") = 0.05, py::arg("wall_tol") = 1e-10);

  py::class_<HeartMembership>(m, "HeartMembership")
      .def_readonly("deg1", &HeartMembership::deg1)
      .def_readonly("deg2", &HeartMembership::deg2)
      .def_readonly("l1_shifted", &HeartMembership::l1_shifted)
      .def_readonly("l2_shifted", &HeartMembership::l2_shifted);
  m.def("heart_membership_n2", &heart_membership_n2, py::arg("params"), py::arg("b"));

  py::class_<BridgelandData3>(m, "BridgelandData3")
      .def_static("for_kahler", &BridgelandData3::for_kahler, py::arg("a"))
      .def_readonly("C0", &BridgelandData3::C0)
      .def_readonly("gamma_dot_H", &BridgelandData3::gamma_dot_H)
      .def_readonly("gamma_dot_E", &BridgelandData3::gamma_dot_E);
  m.def("bridgeland_charge_n3", &bridgeland_charge_n3, py::arg("params"), py::arg("L"),
        py::arg("data"));

  py::class_<HomSpace>(m, "HomSpace")
      .def_readonly("dim", &HomSpace::dim)
      .def_readonly("nontrivial", &HomSpace::nontrivial);
  m.def("hom_dimension", &hom_dimension, py::arg("n"), py::arg("d"));

  // ----------------------------------------------------------- flow
  py::enum_<FlowStatus>(m, "FlowStatus")
      .value("Converged", FlowStatus::Converged)
      .value("TMaxReached", FlowStatus::TMaxReached)
      .value("BlewUp", FlowStatus::BlewUp);

  py::class_<FlowRecord>(m, "FlowRecord")
      .def_readonly("t", &FlowRecord::t)
      .def_readonly("sup_velocity", &FlowRecord::sup_velocity)
      .def_readonly("max_residual", &FlowRecord::max_residual)
      .def_readonly("x_c", &FlowRecord::x_c)
      .def_readonly("y_c", &FlowRecord::y_c)
      .def_readonly("velocity_x", &FlowRecord::velocity_x)
      .def_readonly("barrier_upper", &FlowRecord::barrier_upper)
      .def_readonly("barrier_lower", &FlowRecord::barrier_lower);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_property_readonly("status",
                             [](const ExperimentReport& r) { return r.flow.status; })
      .def_property_readonly("t_final",
                             [](const ExperimentReport& r) { return r.flow.t_final; })
      .def_property_readonly("history",
                             [](const ExperimentReport& r) { return r.flow.history; })
      .def_property_readonly("final_curve",
                             [](const ExperimentReport& r) {
                               return r.flow.curve ? as_pairs(r.flow.curve->pts)
                                                   : std::vector<std::pair<double, double>>{};
                             })
      .def_readonly("q", &ExperimentReport::q)
      .def_readonly("vertex_moved_left", &ExperimentReport::vertex_moved_left)
      .def_readonly("barriers_respected", &ExperimentReport::barriers_respected)
      .def_readonly("barrier_tol", &ExperimentReport::barrier_tol)
      .def_readonly("final_dist_upper", &ExperimentReport::final_dist_upper)
      .def_readonly("final_dist_lower", &ExperimentReport::final_dist_lower)
      .def_readonly("x_inf", &ExperimentReport::x_inf)
      .def_readonly("y_inf", &ExperimentReport::y_inf);

  m.def(
      "unstable_limit_experiment",
      [](int n, double theta_hat, double b, double t_max, double speed_tol, int curve_points,
         int record_every, double dt) {
        ExperimentConfig cfg;
        cfg.n = n;
        cfg.theta_hat = theta_hat;
        cfg.b = b;
        cfg.t_max = t_max;
        cfg.speed_tol = speed_tol;
        cfg.curve_points = curve_points;
        cfg.record_every = record_every;
        cfg.flow.dt = dt;
        return unstable_limit_experiment(cfg);
      },
      py::arg("n") = 2, py::arg("theta_hat") = 0.5235987755982988, py::arg("b") = 1.05,
      py::arg("t_max") = 2.0, py::arg("speed_tol") = 1e-6, py::arg("curve_points") = 400,
      py::arg("record_every") = 10, py::arg("dt") = 0.0);

  m.def("section_profile",
        [](const ConstructionParams& params, double x_lo, double x_hi, int samples) {
          return as_pairs(section_profile(params, x_lo, x_hi, samples).samples);
        },
        py::arg("params"), py::arg("x_lo"), py::arg("x_hi"), py::arg("samples") = 200);

  // ----------------------------------------------------------- bundles
  py::class_<BundleParams>(m, "BundleParams")
      .def(py::init([](int r, int m_, std::complex<double> xi, double b, double theta_hat) {
             return BundleParams{r, m_, xi, b, theta_hat};
           }),
           py::arg("r"), py::arg("m"), py::arg("xi"), py::arg("b"), py::arg("theta_hat"))
      .def_readwrite("r", &BundleParams::r)
      .def_readwrite("m", &BundleParams::m)
      .def_readwrite("xi", &BundleParams::xi)
      .def_readwrite("b", &BundleParams::b)
      .def_readwrite("theta_hat", &BundleParams::theta_hat);

  m.def("vertical_branch_thetas", &vertical_branch_thetas, py::arg("m"), py::arg("r"),
        py::arg("psi"));

  py::class_<BoundaryIntersections>(m, "BoundaryIntersections")
      .def_readonly("q", &BoundaryIntersections::q)
      .def_readonly("q_prime", &BoundaryIntersections::q_prime)
      .def_property_readonly("q_rational",
                             [](const BoundaryIntersections& bi)
                                 -> std::optional<std::pair<long long, long long>> {
                               if (!bi.q_rational) return std::nullopt;
                               return std::pair{bi.q_rational->num, bi.q_rational->den};
                             })
      .def_property_readonly("q_prime_rational",
                             [](const BoundaryIntersections& bi)
                                 -> std::optional<std::pair<long long, long long>> {
                               if (!bi.q_prime_rational) return std::nullopt;
                               return std::pair{bi.q_prime_rational->num,
                                                bi.q_prime_rational->den};
                             })
      .def_property_readonly(
          "arm_plus", [](const BoundaryIntersections& bi) { return as_pairs(bi.arm_plus); })
      .def_property_readonly("arm_minus", [](const BoundaryIntersections& bi) {
        return as_pairs(bi.arm_minus);
      });

  m.def("boundary_intersections", &boundary_intersections, py::arg("params"),
        py::arg("max_denominator") = 1e6);
  m.def("bundle_charge_arg", &bundle_charge_arg, py::arg("params"), py::arg("y"),
        py::arg("base_y"));
  m.def("charge_arg_xi1_derivative", &charge_arg_xi1_derivative, py::arg("params"),
        py::arg("z"));
  m.def("arg_monotonicity", &arg_monotonicity, py::arg("params"), py::arg("y"),
        py::arg("zero_tol") = 1e-12);
}
