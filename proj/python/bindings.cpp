#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>

#include <string>
#include <vector>

#include "surfelgrad/error.hpp"
#include "surfelgrad/grad.hpp"
#include "surfelgrad/json_io.hpp"
#include "surfelgrad/metrics.hpp"
#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace py = pybind11;
using namespace surfelgrad;

namespace {

[[noreturn]] void reject(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

std::string shape_string(const py::array& a) {
  std::string s = "(";
  for (py::ssize_t i = 0; i < a.ndim(); ++i) s += (i ? ", " : "") + std::to_string(a.shape(i));
  return s + (a.ndim() == 1 ? ",)" : ")");
}

// Only C-contiguous float64 is accepted; nothing is converted silently.
void check_buffer(const py::array& a, const char* name) {
  if (!a.dtype().is(py::dtype::of<double>()))
    reject(std::string(name) + ": expected dtype float64, got " + std::string(py::str(a.dtype())));
  if (!(a.flags() & py::array::c_style)) reject(std::string(name) + ": array must be C-contiguous");
}

DepthMap depth_from(const py::array& a, const Camera& camera, const char* name) {
  check_buffer(a, name);
  const Resolution res = camera.resolution();
  if (a.ndim() != 2 || a.shape(0) != res.rows || a.shape(1) != res.cols)
    throw Error(ErrorCode::ResolutionMismatch, std::string(name) + ": expected shape (" + std::to_string(res.rows) +
                                                   ", " + std::to_string(res.cols) + "), got " + shape_string(a));
  const auto* p = static_cast<const double*>(a.data());
  return DepthMap(res, std::vector<double>(p, p + a.size()));
}

Grid<Vec3> vec3_grid_from(const py::array& a, const Camera& camera, const char* name) {
  check_buffer(a, name);
  const Resolution res = camera.resolution();
  if (a.ndim() != 3 || a.shape(0) != res.rows || a.shape(1) != res.cols || a.shape(2) != 3)
    throw Error(ErrorCode::ResolutionMismatch, std::string(name) + ": expected shape (" + std::to_string(res.rows) +
                                                   ", " + std::to_string(res.cols) + ", 3), got " + shape_string(a));
  const auto* p = static_cast<const double*>(a.data());
  Grid<Vec3> out(res);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  return out;
}

std::vector<Vec3> points_from(const py::array& a, const char* name) {
  check_buffer(a, name);
  if (a.ndim() != 2 || a.shape(1) != 3) reject(std::string(name) + ": expected shape (N, 3), got " + shape_string(a));
  const auto* p = static_cast<const double*>(a.data());
  std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  return out;
}

py::array_t<double> to_array(const Grid<double>& g) {
  py::array_t<double> out({g.rows(), g.cols()});
  std::copy(g.storage().begin(), g.storage().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const Grid<Vec3>& g) {
  py::array_t<double> out({g.rows(), g.cols(), 3});
  double* p = out.mutable_data();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int c = 0; c < 3; ++c) p[3 * i + static_cast<std::size_t>(c)] = g[i][c];
  return out;
}

struct Rig {
  Camera camera;
  Material material;
  LightingRig lights;
};

Rig parse_rig(const std::string& camera, const std::string& material, const std::string& lights) {
  return {camera_from_json(parse_json(camera, "camera_json")), material_from_json(parse_json(material, "material_json")),
          lighting_from_json(parse_json(lights, "lights_json"))};
}

py::array_t<double> py_render(const py::array& depth, const std::string& camera, const std::string& material,
                              const std::string& lights) {
  const Rig rig = parse_rig(camera, material, lights);
  const DepthMap d = depth_from(depth, rig.camera, "depth");
  Image image;
  {
    py::gil_scoped_release release;
    image = render(d, rig.camera, rig.material, rig.lights);
  }
  return to_array(image);
}

py::array_t<double> py_render_backward(const py::array& depth, const py::array& upstream, const std::string& camera,
                                       const std::string& material, const std::string& lights) {
  const Rig rig = parse_rig(camera, material, lights);
  const DepthMap d = depth_from(depth, rig.camera, "depth");
  const Image up = vec3_grid_from(upstream, rig.camera, "upstream");
  GradMap grad;
  {
    py::gil_scoped_release release;
    grad = render_backward(d, rig.camera, rig.material, rig.lights, up);
  }
  return to_array(grad);
}

double py_chamfer(const py::array& a, const py::array& b) {
  const std::vector<Vec3> pa = points_from(a, "a");
  const std::vector<Vec3> pb = points_from(b, "b");
  py::gil_scoped_release release;
  return chamfer(pa, pb);
}

py::array_t<double> py_estimate_normals(const py::array& depth, const std::string& camera_json) {
  const Camera camera = camera_from_json(parse_json(camera_json, "camera_json"));
  const DepthMap d = depth_from(depth, camera, "depth");
  NormalGrid normals;
  {
    py::gil_scoped_release release;
    validate_depth(d);
    normals = estimate_normals(backproject(d, camera)).normals;
  }
  return to_array(normals);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differentiable surfel renderer: forward, backward, normals and metrics on float64 arrays";

  // Error carries the core error kind in .code (e.g. "InvalidParam").
  py::exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    const auto raise = [](std::string_view code, const char* message) {
      const py::object type = py::module_::import("surfelgrad._core").attr("Error");
      py::object inst = type(message);
      inst.attr("code") = std::string(code);
      PyErr_SetObject(type.ptr(), inst.ptr());
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      raise(to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      raise("ParseError", e.what());
    }
  });

  m.def("render", &py_render, py::arg("depth"), py::arg("camera_json"), py::arg("material_json"),
        py::arg("lights_json"), "Shade an (H, W) depth map; returns an (H, W, 3) linear RGB image.");
  m.def("render_backward", &py_render_backward, py::arg("depth"), py::arg("upstream"), py::arg("camera_json"),
        py::arg("material_json"), py::arg("lights_json"),
        "Pull an (H, W, 3) image gradient back to an (H, W) depth gradient.");
  m.def("chamfer", &py_chamfer, py::arg("a"), py::arg("b"), "Chamfer distance between (N, 3) and (M, 3) point sets.");
  m.def("estimate_normals", &py_estimate_normals, py::arg("depth"), py::arg("camera_json"),
        "Unit camera-space normals, (H, W, 3).");
  m.def("version", [] { return std::string(SURFELGRAD_VERSION); });
}
