#include "surfelgrad/polycube.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "surfelgrad/error.hpp"
#include "surfelgrad/scene.hpp"

namespace surfelgrad {

namespace {

std::vector<Cell> canonical(std::vector<Cell> cells) {
  if (cells.empty()) return cells;
  Cell lo = cells[0];
  for (const Cell& c : cells)
    for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], c[a]);
  for (Cell& c : cells)
    for (int a = 0; a < 3; ++a) c[a] -= lo[a];
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

Cell apply(const IntMat3& m, const Cell& c) {
  Cell out{};
  for (int r = 0; r < 3; ++r) out[r] = m[r][0] * c[0] + m[r][1] * c[1] + m[r][2] * c[2];
  return out;
}

int determinant(const IntMat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

constexpr std::array<Cell, 6> kSteps{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

}  // namespace

const std::vector<IntMat3>& grid_rotations() {
  static const std::vector<IntMat3> rotations = [] {
    std::vector<IntMat3> out;
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms)
      for (int signs = 0; signs < 8; ++signs) {
        IntMat3 m{};
        for (int r = 0; r < 3; ++r) m[r][p[r]] = (signs >> r) & 1 ? -1 : 1;
        if (determinant(m) == 1) out.push_back(m);
      }
    return out;
  }();
  return rotations;
}

Polycube::Polycube(std::vector<Cell> cells) : cells_(canonical(std::move(cells))) {}

bool Polycube::connected() const {
  if (cells_.empty()) return false;
  const std::set<Cell> all(cells_.begin(), cells_.end());
  std::set<Cell> seen{cells_[0]};
  std::vector<Cell> frontier{cells_[0]};
  while (!frontier.empty()) {
    const Cell c = frontier.back();
    frontier.pop_back();
    for (const Cell& s : kSteps) {
      const Cell n{c[0] + s[0], c[1] + s[1], c[2] + s[2]};
      if (all.count(n) && seen.insert(n).second) frontier.push_back(n);
    }
  }
  return seen.size() == all.size();
}

Polycube Polycube::mirrored() const {
  std::vector<Cell> out = cells_;
  for (Cell& c : out) c[0] = -c[0];
  return Polycube(std::move(out));
}

Polycube Polycube::rotated(int grid_rotation) const {
  const IntMat3& m = grid_rotations().at(static_cast<std::size_t>(grid_rotation));
  std::vector<Cell> out;
  out.reserve(cells_.size());
  for (const Cell& c : cells_) out.push_back(apply(m, c));
  return Polycube(std::move(out));
}

bool Polycube::rotationally_symmetric() const {
  for (int k = 1; k < 24; ++k)
    if (rotated(k) == *this) return true;
  return false;
}

bool Polycube::rotation_equivalent(const Polycube& other) const {
  if (other.size() != size()) return false;
  for (int k = 0; k < 24; ++k)
    if (rotated(k) == other) return true;
  return false;
}

bool Polycube::achiral() const { return rotation_equivalent(mirrored()); }

std::string Polycube::id() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (i) out << ';';
    out << cells_[i][0] << ',' << cells_[i][1] << ',' << cells_[i][2];
  }
  return out.str();
}

Polycube Polycube::from_id(const std::string& id) {
  std::vector<Cell> cells;
  std::istringstream in(id);
  std::string token;
  while (std::getline(in, token, ';')) {
    Cell c{};
    char comma1 = 0;
    char comma2 = 0;
    std::istringstream cell(token);
    if (!(cell >> c[0] >> comma1 >> c[1] >> comma2 >> c[2]) || comma1 != ',' || comma2 != ',')
      throw Error(ErrorCode::ParseError, "malformed polycube id '" + id + "'");
    cells.push_back(c);
  }
  if (cells.empty()) throw Error(ErrorCode::ParseError, "empty polycube id");
  return Polycube(std::move(cells));
}

Polycube sample_polycube(Rng& rng, int cube_count) {
  if (cube_count < 4) throw Error(ErrorCode::InvalidParam, "polycubes need at least 4 cubes");
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Cell> cells{{0, 0, 0}};
    std::set<Cell> occupied{{0, 0, 0}};
    int dir = static_cast<int>(rng.uniform_int(0, 5));
    bool stuck = false;
    while (static_cast<int>(cells.size()) < cube_count && !stuck) {
      // Keep heading with probability 1/2, otherwise turn onto a random
      // perpendicular axis.
      if (cells.size() > 1 && rng.uniform() < 0.5) {
        const int axis = dir / 2;
        int turn = static_cast<int>(rng.uniform_int(0, 3));
        int candidate = 0;
        for (int d = 0; d < 6; ++d) {
          if (d / 2 == axis) continue;
          if (turn-- == 0) {
            candidate = d;
            break;
          }
        }
        dir = candidate;
      }
      const Cell& last = cells.back();
      Cell next{last[0] + kSteps[dir][0], last[1] + kSteps[dir][1], last[2] + kSteps[dir][2]};
      if (occupied.count(next)) {
        stuck = true;
        break;
      }
      cells.push_back(next);
      occupied.insert(next);
    }
    if (stuck) continue;
    Polycube shape(std::move(cells));
    if (shape.rotationally_symmetric() || shape.achiral()) continue;
    return shape;
  }
  throw Error(ErrorCode::SamplingFailure,
              "no asymmetric chiral polycube of size " + std::to_string(cube_count) + " after bounded retries");
}

void validate(const IqttConfig& config) {
  if (config.cube_count < 4) throw Error(ErrorCode::InvalidParam, "cube_count must be at least 4");
  if (config.image_size < 2) throw Error(ErrorCode::InvalidParam, "image_size must be at least 2");
  if (config.n_lights < 0) throw Error(ErrorCode::InvalidParam, "n_lights must be non-negative");
}

std::vector<Vec3> posed_cell_centers(const Polycube& shape, const Quat& rotation) {
  Vec3 centroid;
  for (const Cell& c : shape.cells()) centroid += Vec3{c[0] + 0.5, c[1] + 0.5, c[2] + 0.5};
  centroid = centroid / static_cast<double>(shape.size());
  const Mat3 rot = rotation.to_matrix();
  std::vector<Vec3> out;
  out.reserve(shape.size());
  for (const Cell& c : shape.cells()) out.push_back(rot * (Vec3{c[0] + 0.5, c[1] + 0.5, c[2] + 0.5} - centroid));
  return out;
}

Image render_polycube(const Polycube& shape, const Quat& rotation, const Camera& camera, const LightingRig& lights,
                      const Material& material) {
  std::vector<Primitive> boxes;
  for (const Vec3& center : posed_cell_centers(shape, rotation))
    boxes.push_back(Primitive{PrimitiveKind::Box, center, {0.5, 0.5, 0.5}, rotation});
  const TraceResult traced = trace(boxes, nullptr, camera);
  return render_masked(traced.depth, traced.hit, camera, material, lights);
}

namespace {

double centered_radius(const Polycube& shape) {
  double radius = 0.0;
  for (const Vec3& p : posed_cell_centers(shape, Quat{})) radius = std::max(radius, norm(p));
  return radius + std::sqrt(3.0) / 2.0;
}

}  // namespace

IqttQuestion gen_iqtt(Rng& rng, const IqttConfig& config) {
  validate(config);
  const Polycube shape = sample_polycube(rng, config.cube_count);
  const Polycube mirror = shape.mirrored();
  Polycube other;
  for (int tries = 0;; ++tries) {
    if (tries >= 1000) throw Error(ErrorCode::SamplingFailure, "could not sample a distinct distractor shape");
    other = sample_polycube(rng, config.cube_count);
    if (!other.rotation_equivalent(shape) && !other.rotation_equivalent(mirror)) break;
  }

  const Quat reference_rotation = rng.rotation();
  Quat answer_rotation = rng.rotation();
  while (answer_rotation == reference_rotation) answer_rotation = rng.rotation();
  const Quat mirror_rotation = rng.rotation();
  const Quat other_rotation = rng.rotation();

  // Keep the whole shape in view at the narrowest field of view (25 mm lens
  // on a 24 mm sensor has a half angle of about 25.6 degrees).
  const double radius = std::max(centered_radius(shape), centered_radius(other));
  const double distance = 2.6 * radius;
  PoseConfig pose;
  pose.mode = PoseMode::FullSphere;
  pose.radius_min = distance;
  pose.radius_max = 1.1 * distance;
  pose.resolution = {config.image_size, config.image_size};
  const Camera camera = sample_camera_pose(rng, pose);

  LightingRig lights;
  lights.ambient = config.ambient;
  for (int j = 0; j < config.n_lights; ++j) {
    const Vec3 pos = sample_sphere_position(rng, PoseMode::FullSphere, 2.0 * distance, 2.5 * distance, {});
    const Rgb color = rng.uniform_vec({0.5, 0.5, 0.5}, {1.0, 1.0, 1.0});
    lights.lights.push_back(make_normalized_light(pos, color, {}));
  }

  const int answer = static_cast<int>(rng.uniform_int(0, 2));
  const bool mirror_first = rng.uniform() < 0.5;

  Material material;
  material.albedo = config.albedo;

  IqttQuestion q;
  q.answer_index = answer;
  q.camera = camera;
  q.lights = lights;
  q.provenance.reference_shape = shape.id();
  q.provenance.reference_rotation = reference_rotation;
  q.reference = render_polycube(shape, reference_rotation, camera, lights, material);

  int slot_distractor = 0;
  for (int slot = 0; slot < 3; ++slot) {
    IqttCandidate& cand = q.provenance.candidates[static_cast<std::size_t>(slot)];
    Image& image = q.candidates[static_cast<std::size_t>(slot)];
    if (slot == answer) {
      cand = {shape.id(), answer_rotation, false};
      image = render_polycube(shape, answer_rotation, camera, lights, material);
      continue;
    }
    const bool use_mirror = (slot_distractor++ == 0) == mirror_first;
    if (use_mirror) {
      cand = {shape.id(), mirror_rotation, true};
      image = render_polycube(mirror, mirror_rotation, camera, lights, material);
    } else {
      cand = {other.id(), other_rotation, false};
      image = render_polycube(other, other_rotation, camera, lights, material);
    }
  }
  return q;
}

}  // namespace surfelgrad
