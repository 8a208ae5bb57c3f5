#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "surfelgrad/rng.hpp"
#include "surfelgrad/shading.hpp"

namespace surfelgrad {

using Cell = std::array<int, 3>;

/// Face-connected set of unit cubes. Canonical form: translated so the
/// minimum corner is the origin, cells sorted lexicographically.
class Polycube {
 public:
  Polycube() = default;
  explicit Polycube(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  bool connected() const;
  Polycube mirrored() const;                 // x -> -x
  Polycube rotated(int grid_rotation) const;  // index into grid_rotations()

  /// True when some non-identity grid rotation maps the shape onto itself.
  bool rotationally_symmetric() const;
  /// True when the mirror image equals some rotation of the shape.
  bool achiral() const;
  /// True when some grid rotation maps this shape onto `other`.
  bool rotation_equivalent(const Polycube& other) const;

  /// Compact textual id: "x,y,z;x,y,z;..." of the canonical cells.
  std::string id() const;
  static Polycube from_id(const std::string& id);

  friend bool operator==(const Polycube&, const Polycube&) = default;

 private:
  std::vector<Cell> cells_;
};

using IntMat3 = std::array<std::array<int, 3>, 3>;

/// The 24 proper rotations of the cube lattice; index 0 is the identity.
const std::vector<IntMat3>& grid_rotations();

/// Self-avoiding random walk with turns, rejecting shapes that are
/// rotationally symmetric or achiral. Throws SamplingFailure.
Polycube sample_polycube(Rng& rng, int cube_count);

struct IqttConfig {
  int cube_count = 8;
  int image_size = 128;
  int n_lights = 2;
  Rgb ambient{0.15, 0.15, 0.15};
  Rgb albedo{0.7, 0.7, 0.7};
};

void validate(const IqttConfig& config);

struct IqttCandidate {
  std::string shape;  // Polycube::id of the unmirrored source shape
  Quat rotation;
  bool mirrored = false;
};

struct IqttProvenance {
  std::string reference_shape;
  Quat reference_rotation;
  std::array<IqttCandidate, 3> candidates;
};

struct IqttQuestion {
  Image reference;
  std::array<Image, 3> candidates;
  int answer_index = 0;
  IqttProvenance provenance;
  Camera camera;
  LightingRig lights;
};

/// World-space cube centers of a (possibly mirrored) shape after centering
/// on its centroid and rotating.
std::vector<Vec3> posed_cell_centers(const Polycube& shape, const Quat& rotation);

/// Renders a posed polycube as unit boxes on a black background.
Image render_polycube(const Polycube& shape, const Quat& rotation, const Camera& camera, const LightingRig& lights,
                      const Material& material);

/// One mental-rotation question: a reference view and three candidates, one
/// of which is the reference shape under a different rotation. The
/// distractors are the mirror image and an unrelated shape.
IqttQuestion gen_iqtt(Rng& rng, const IqttConfig& config);

}  // namespace surfelgrad
