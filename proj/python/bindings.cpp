#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfront/errors.hpp"
#include "cfront/hypersurface.hpp"
#include "cfront/rd_solver.hpp"
#include "cfront/snapshot.hpp"
#include "cfront/wave_profile.hpp"

namespace py = pybind11;
using namespace cfront;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

Point point(const std::vector<double>& z) {
    if (z.empty() || z.size() > 3) throw ValidationError("point: expected 1 to 3 coordinates");
    Point p{0, 0, 0};
    for (std::size_t k = 0; k < z.size(); ++k) p[k] = z[k];
    return p;
}

XVec xvec(const std::vector<double>& x) {
    if (x.size() > 2) throw ValidationError("x: expected at most 2 coordinates");
    XVec v{0, 0};
    for (std::size_t k = 0; k < x.size(); ++k) v[k] = x[k];
    return v;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "combustion fronts: profiles, wave speeds, implicit surfaces";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<CombustionNonlinearity>(m, "Nonlinearity")
        .def(py::init(&make_combustion), py::arg("theta"), py::arg("a") = 1.0, py::arg("p") = 2.0,
             py::arg("sigma") = 0.1)
        .def_property_readonly("theta", &CombustionNonlinearity::theta)
        .def_property_readonly("gamma_star", &CombustionNonlinearity::gamma_star)
        .def_property_readonly("fprime_at_one", &CombustionNonlinearity::fprime_at_one)
        .def("f", &CombustionNonlinearity::f)
        .def("fprime", &CombustionNonlinearity::fprime)
        .def("scaled", &CombustionNonlinearity::scaled);

    m.def("find_wave_speed", &find_wave_speed, py::arg("nl"));
    m.def("shooting_function", &shooting_function, py::arg("nl"), py::arg("c"));

    py::class_<WaveProfile>(m, "WaveProfile")
        .def_property_readonly("speed", &WaveProfile::speed)
        .def_property_readonly("beta0", &WaveProfile::beta0)
        .def("__call__", [](const WaveProfile& p, double D) { return p(D); })
        .def("derivative", [](const WaveProfile& p, double D) { return p.eval(D).du; })
        .def("inverse", &WaveProfile::inverse)
        .def("grid", [](const WaveProfile& p) { return as_array(p.grid()); })
        .def("values", [](const WaveProfile& p) { return as_array(p.values()); });

    m.def("build_profile", &build_profile, py::arg("nl"), py::arg("c"), py::arg("half_width") = 60.0,
          py::arg("step") = 0.01);

    m.def(
        "check_profile",
        [](const WaveProfile& p, const CombustionNonlinearity& nl) {
            auto r = check_profile(p, nl);
            return py::dict(py::arg("ode_residual") = r.ode_residual, py::arg("tail_error") = r.tail_error,
                            py::arg("char_root") = r.char_root, py::arg("beta0_rel_error") = r.beta0_rel_error);
        },
        py::arg("profile"), py::arg("nl"));

    m.def(
        "check_scaling",
        [](const CombustionNonlinearity& nl, double k) {
            auto r = check_scaling(nl, k);
            return py::dict(py::arg("speed_ratio") = r.speed_ratio, py::arg("profile_error") = r.profile_error);
        },
        py::arg("nl"), py::arg("k") = 2.0);

    m.def(
        "measure_speed_1d",
        [](const CombustionNonlinearity& nl, double dx, double length) {
            SpeedConfig sc;
            sc.dx = dx;
            sc.length = length;
            auto e = measure_speed_1d(nl, sc);
            return py::dict(py::arg("speed") = e.speed, py::arg("stderr") = e.stderr_, py::arg("samples") = e.samples);
        },
        py::arg("nl"), py::arg("dx") = 0.2, py::arg("length") = 600.0);

    py::class_<FrontConfiguration>(m, "FrontConfiguration")
        .def_static("symmetric", &FrontConfiguration::symmetric, py::arg("dimension"), py::arg("count"),
                    py::arg("angle"), py::arg("speed"))
        .def_property_readonly("dimension", &FrontConfiguration::dimension)
        .def_property_readonly("speed", &FrontConfiguration::speed)
        .def("__len__", &FrontConfiguration::size)
        .def("min_q", [](const FrontConfiguration& c, double t, const std::vector<double>& z) {
            return min_q(c, t, point(z));
        })
        .def("boundary_distance", [](const FrontConfiguration& c, double t, const std::vector<double>& z) {
            return boundary_distance(c, t, point(z));
        })
        .def("ridge_distance", [](const FrontConfiguration& c, double t, const std::vector<double>& z) {
            return ridge_distance(c, t, point(z));
        });

    py::class_<ScaledSurface>(m, "Surface")
        .def(py::init<const FrontConfiguration&, double>(), py::arg("config"), py::arg("alpha") = 1.0)
        .def("phi", [](const ScaledSurface& s, double t, const std::vector<double>& x) {
            return s.solve_phi(t, xvec(x));
        })
        .def("psi", [](const ScaledSurface& s, double t, const std::vector<double>& x) { return s.psi(t, xvec(x)); })
        .def("flatness", [](const ScaledSurface& s, double t, const std::vector<double>& x) {
            return s.flatness(t, xvec(x)).pair_sum;
        });

    m.def(
        "check_surface",
        [](const FrontConfiguration& cfg, double alpha, std::size_t count, double box, std::uint64_t seed) {
            auto r = check_surface(cfg, alpha, count, box, seed);
            return py::dict(py::arg("max_residual") = r.max_residual, py::arg("min_gap") = r.min_gap,
                            py::arg("c_hat") = r.c_hat, py::arg("holdout_ratio") = r.holdout_ratio,
                            py::arg("max_fd_error") = r.max_fd_error);
        },
        py::arg("config"), py::arg("alpha") = 1.0, py::arg("count") = 10000, py::arg("box") = 10.0,
        py::arg("seed") = 1);

    m.def(
        "read_snapshot",
        [](const std::string& path) {
            Field f = read_snapshot(path);
            std::vector<py::ssize_t> shape;
            for (int k = 0; k < f.grid.dim; ++k) shape.push_back(static_cast<py::ssize_t>(f.grid.n[k]));
            py::array_t<double> a(shape);
            std::copy(f.values.begin(), f.values.end(), a.mutable_data());
            std::vector<double> origin(f.grid.origin.begin(), f.grid.origin.begin() + f.grid.dim);
            return py::make_tuple(a, py::dict(py::arg("dx") = f.grid.dx, py::arg("time") = f.time,
                                              py::arg("origin") = origin));
        },
        py::arg("path"));
}
