#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace fth::physics {

using Vec3 = Eigen::Vector3d;

// Units: mm, g, s. One newton is 1e6 g·mm/s².
inline constexpr double kNewton = 1e6;

struct ProxyPair {
  Vec3 index_pos = Vec3::Zero();
  Vec3 thumb_pos = Vec3::Zero();

  const Vec3& operator[](int i) const { return i == 0 ? index_pos : thumb_pos; }
  Vec3& operator[](int i) { return i == 0 ? index_pos : thumb_pos; }
};

struct CouplingParams {
  double spring_stiffness = 1.0;     // N/mm
  double spring_damping = 0.0089;    // N·s/mm, about critical for 20 g
  double sphere_radius = 10.0;       // mm
  double sphere_mass = 20.0;         // g

  void validate() const;
};

struct ContactParams {
  double friction_coeff = 0.8;
  double cube_stiffness = 10.0;        // N/mm, sphere–cube penalty
  double cube_damping = 0.002;         // N·s/mm
  double tangential_stiffness = 5.0;   // N/mm, static-friction anchor spring
  double tangential_damping = 0.002;   // N·s/mm
  double support_stiffness = 400.0;    // N/mm, cube on stand/floor (integrated implicitly)
  double support_damping = 0.4;        // N·s/mm
  double support_tangential_stiffness = 2.0;  // N/mm
  double support_tangential_damping = 0.028;  // N·s/mm
  double yaw_damping = 1e6;            // g·mm²/s while supported
  double gravity = 9810.0;             // mm/s²
};

// Axis-aligned stand footprint with its top height.
struct Stand {
  double center_x = 0.0;
  double center_y = 0.0;
  double half_x = 30.0;
  double half_y = 30.0;
  double top = 80.0;

  bool contains(double x, double y) const {
    return x >= center_x - half_x && x <= center_x + half_x && y >= center_y - half_y && y <= center_y + half_y;
  }
};

// Friction contact memory: the anchor is where the stick spring is attached,
// expressed in the cube frame for fingers and in world coordinates for the
// support.
struct StickAnchor {
  bool active = false;
  Vec3 point = Vec3::Zero();
};

struct Scene {
  std::array<Vec3, 2> sphere_pos{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> sphere_vel{Vec3::Zero(), Vec3::Zero()};
  Vec3 cube_pos = Vec3::Zero();  // center
  double cube_yaw = 0.0;         // rad about +z
  Vec3 cube_vel = Vec3::Zero();
  double cube_yaw_rate = 0.0;
  double cube_size = 40.0;  // mm edge
  double cube_mass = 100.0;  // g
  Stand pickup_stand{0.0, 0.0, 40.0, 40.0, 80.0};
  Stand target_stand{200.0, 0.0, 30.0, 30.0, 80.0};
  // Support plane under the stands. The cube counts as fallen once its
  // center is lower than one cube edge above this plane.
  double floor_height = 0.0;
  std::array<bool, 2> contact_flags{false, false};
  ContactParams contact;

  // Derived per-step quantities, kept for recording and friction.
  std::array<StickAnchor, 2> finger_anchor;
  StickAnchor support_anchor;
  double support_normal_force = 0.0;  // g·mm/s²
  int support_id = -1;                // -1 none, 0 floor, 1 pickup, 2 target
  std::array<Vec3, 2> contact_force{Vec3::Zero(), Vec3::Zero()};  // on the cube, per finger
  std::optional<ProxyPair> last_proxies;  // for the proxy velocity seen by the damper
  double time = 0.0;

  // Cube at rest on the pickup stand, spheres parked above it.
  static Scene standard();
  double cube_half() const { return 0.5 * cube_size; }
};

// Advances the scene by dt (0 < dt <= 5 ms). The proxy-sphere spring-damper
// is integrated implicitly (backward Euler), contacts explicitly; the cube's
// support contact is implicit along z. Throws SimulationDiverged on a
// non-finite result.
Scene physics_step(const Scene& scene, const ProxyPair& proxies, const CouplingParams& params, double dt);

// Euclidean proxy-sphere distance.
double indentation(const Vec3& proxy, const Vec3& sphere_pos);
// Indentation as reported by the scene: zero while the sphere is not touching.
double contact_indentation(const Vec3& proxy, const Vec3& sphere_pos, bool in_contact);

// Coupling force magnitude for an indentation, N.
double interaction_force(double indentation_mm, double stiffness_n_per_mm);

// Kinetic plus coupling-spring energy of the spheres, g·mm²/s².
double coupling_energy(const Scene& scene, const ProxyPair& proxies, const CouplingParams& params);

}  // namespace fth::physics
