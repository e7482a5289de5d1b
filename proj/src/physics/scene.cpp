#include "fth/physics/scene.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "fth/errors.hpp"

namespace fth::physics {
namespace {

Eigen::Matrix3d yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

struct SphereContact {
  bool touching = false;
  double penetration = 0.0;
  Vec3 normal = Vec3::Zero();       // world, from cube toward sphere
  Vec3 local_point = Vec3::Zero();  // closest cube point in the cube frame
};

SphereContact sphere_box(const Vec3& center, double radius, const Vec3& cube_pos, const Eigen::Matrix3d& rot,
                         double half) {
  const Vec3 l = rot.transpose() * (center - cube_pos);
  Vec3 q = l.cwiseMax(-half).cwiseMin(half);
  SphereContact c;
  const Vec3 d = l - q;
  const double dist = d.norm();
  if (dist > 0.0) {
    c.penetration = radius - dist;
    c.normal = rot * (d / dist);
  } else {
    // Center inside the box: push out through the nearest face.
    int axis = 0;
    double depth = half - std::abs(l[0]);
    for (int k = 1; k < 3; ++k) {
      const double dk = half - std::abs(l[k]);
      if (dk < depth) {
        depth = dk;
        axis = k;
      }
    }
    const double sign = l[axis] >= 0.0 ? 1.0 : -1.0;
    q[axis] = sign * half;
    c.penetration = radius + depth;
    c.normal = rot * (sign * Vec3::Unit(axis));
  }
  c.local_point = q;
  c.touching = c.penetration > 0.0;
  return c;
}

// Spring-damper stick anchor capped by the Coulomb limit. Returns the
// tangential force on the moving body; slides the anchor when capped.
Vec3 stick_force(const Vec3& point, Vec3& anchor_world, const Vec3& normal, const Vec3& v_rel, double k, double c,
                 double limit) {
  Vec3 disp = point - anchor_world;
  disp -= disp.dot(normal) * normal;
  const Vec3 vt = v_rel - v_rel.dot(normal) * normal;
  const double spring = k * disp.norm();
  if (spring > limit && spring > 0.0) {
    disp *= limit / spring;
    anchor_world = point - disp;
  }
  Vec3 f = -k * disp - c * vt;
  const double mag = f.norm();
  if (mag > limit && mag > 0.0) f *= limit / mag;
  return f;
}

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

void CouplingParams::validate() const {
  if (!(spring_stiffness > 0.0) || !(spring_damping >= 0.0) || !(sphere_radius > 0.0) || !(sphere_mass > 0.0))
    throw InvalidInput("coupling: stiffness, radius and mass must be positive, damping non-negative");
}

Scene Scene::standard() {
  Scene s;
  s.cube_pos = Vec3(s.pickup_stand.center_x, s.pickup_stand.center_y, s.pickup_stand.top + s.cube_half());
  const double park = s.cube_pos.z() + 60.0;
  s.sphere_pos[0] = Vec3(s.cube_pos.x(), s.cube_pos.y() + 45.0, park);
  s.sphere_pos[1] = Vec3(s.cube_pos.x(), s.cube_pos.y() - 45.0, park);
  // Start settled: the support already carries the weight.
  s.support_id = 1;
  s.support_normal_force = s.cube_mass * s.contact.gravity;
  s.support_anchor = {true, s.cube_pos};
  return s;
}

double indentation(const Vec3& proxy, const Vec3& sphere_pos) { return (proxy - sphere_pos).norm(); }

double contact_indentation(const Vec3& proxy, const Vec3& sphere_pos, bool in_contact) {
  return in_contact ? indentation(proxy, sphere_pos) : 0.0;
}

double interaction_force(double indentation_mm, double stiffness_n_per_mm) {
  if (!(indentation_mm >= 0.0)) throw InvalidInput("interaction_force: indentation must be >= 0");
  return indentation_mm * stiffness_n_per_mm;
}

double coupling_energy(const Scene& scene, const ProxyPair& proxies, const CouplingParams& params) {
  const double k = params.spring_stiffness * kNewton;
  double e = 0.0;
  for (int i = 0; i < 2; ++i)
    e += 0.5 * params.sphere_mass * scene.sphere_vel[i].squaredNorm() +
         0.5 * k * (scene.sphere_pos[i] - proxies[i]).squaredNorm();
  return e;
}

Scene physics_step(const Scene& scene, const ProxyPair& proxies, const CouplingParams& params, double dt) {
  if (!(dt > 0.0 && dt <= 0.005)) throw InvalidInput("physics_step: dt must be in (0, 5 ms]");
  if (!finite(proxies.index_pos) || !finite(proxies.thumb_pos)) throw SimulationDiverged("physics_step: non-finite proxy");

  const ContactParams& cp = scene.contact;
  Scene s = scene;
  const double half = s.cube_half();
  const Eigen::Matrix3d rot = yaw_rotation(s.cube_yaw);
  const Vec3 omega(0.0, 0.0, s.cube_yaw_rate);

  // Finger contacts, explicit.
  Vec3 cube_force = Vec3::Zero();
  double cube_torque = 0.0;
  std::array<Vec3, 2> sphere_force{Vec3::Zero(), Vec3::Zero()};
  for (int i = 0; i < 2; ++i) {
    const auto c = sphere_box(s.sphere_pos[i], params.sphere_radius, s.cube_pos, rot, half);
    s.contact_flags[i] = c.touching;
    s.contact_force[i] = Vec3::Zero();
    if (!c.touching) {
      s.finger_anchor[i].active = false;
      continue;
    }
    const Vec3 arm = rot * c.local_point;
    const Vec3 point = s.cube_pos + arm;
    const Vec3 v_rel = s.sphere_vel[i] - (s.cube_vel + omega.cross(arm));
    const double vn = v_rel.dot(c.normal);
    const double fn = std::max(0.0, cp.cube_stiffness * kNewton * c.penetration - cp.cube_damping * kNewton * vn);

    if (!s.finger_anchor[i].active) s.finger_anchor[i] = {true, c.local_point};
    Vec3 anchor = s.cube_pos + rot * s.finger_anchor[i].point;
    const Vec3 ft = stick_force(point, anchor, c.normal, v_rel, cp.tangential_stiffness * kNewton,
                                cp.tangential_damping * kNewton, cp.friction_coeff * fn);
    s.finger_anchor[i].point = rot.transpose() * (anchor - s.cube_pos);

    sphere_force[i] = fn * c.normal + ft;
    s.contact_force[i] = -sphere_force[i];
    cube_force -= sphere_force[i];
    cube_torque += arm.cross(Vec3(-sphere_force[i])).z();
  }

  // Spheres: backward Euler on the proxy coupling, damping relative to the proxy velocity.
  const double m = params.sphere_mass;
  const double k = params.spring_stiffness * kNewton;
  const double c = params.spring_damping * kNewton;
  for (int i = 0; i < 2; ++i) {
    const Vec3 vp = s.last_proxies ? Vec3((proxies[i] - (*s.last_proxies)[i]) / dt) : Vec3::Zero();
    const Vec3 rhs = s.sphere_vel[i] + dt / m * (sphere_force[i] - k * (s.sphere_pos[i] - proxies[i]) + c * vp);
    s.sphere_vel[i] = rhs / (1.0 + dt * c / m + dt * dt * k / m);
    s.sphere_pos[i] += dt * s.sphere_vel[i];
  }
  s.last_proxies = proxies;

  // Support surface under the cube center: the highest stand whose footprint
  // holds the center and whose top is not above the cube, else the floor.
  const double bottom = s.cube_pos.z() - half;
  int support = 0;
  double support_h = s.floor_height;
  const Stand* stands[2] = {&s.pickup_stand, &s.target_stand};
  for (int j = 0; j < 2; ++j) {
    const Stand& st = *stands[j];
    if (st.contains(s.cube_pos.x(), s.cube_pos.y()) && bottom >= st.top - 5.0 && st.top > support_h) {
      support = j + 1;
      support_h = st.top;
    }
  }
  if (support != s.support_id) s.support_anchor.active = false;
  s.support_id = support;

  const double M = s.cube_mass;
  cube_force.z() -= M * cp.gravity;

  // Support friction from the previous normal force, explicit in x/y.
  const bool was_supported = s.support_normal_force > 0.0;
  if (was_supported) {
    if (!s.support_anchor.active) s.support_anchor = {true, s.cube_pos};
    Vec3 anchor = s.support_anchor.point;
    anchor.z() = s.cube_pos.z();
    const Vec3 v_xy(s.cube_vel.x(), s.cube_vel.y(), 0.0);
    const Vec3 ft = stick_force(s.cube_pos, anchor, Vec3::UnitZ(), v_xy, cp.support_tangential_stiffness * kNewton,
                                cp.support_tangential_damping * kNewton, cp.friction_coeff * s.support_normal_force);
    s.support_anchor.point = anchor;
    cube_force.x() += ft.x();
    cube_force.y() += ft.y();
  } else {
    s.support_anchor.active = false;
  }

  s.cube_vel.x() += dt * cube_force.x() / M;
  s.cube_vel.y() += dt * cube_force.y() / M;

  // Vertical: explicit unless the step would end in the support, then implicit.
  const double vz_explicit = s.cube_vel.z() + dt * cube_force.z() / M;
  const double bottom_explicit = bottom + dt * vz_explicit;
  double normal = 0.0;
  double vz = vz_explicit;
  if (bottom_explicit < support_h) {
    const double K = cp.support_stiffness * kNewton;
    const double C = cp.support_damping * kNewton;
    const double vz_imp =
        (s.cube_vel.z() + dt / M * (cube_force.z() + K * (support_h - bottom))) / (1.0 + dt * C / M + dt * dt * K / M);
    const double n = K * (support_h - (bottom + dt * vz_imp)) - C * vz_imp;
    if (n > 0.0) {
      vz = vz_imp;
      normal = n;
    }
  }
  s.cube_vel.z() = vz;
  s.support_normal_force = normal;
  s.cube_pos += dt * s.cube_vel;

  const double inertia = M * s.cube_size * s.cube_size / 6.0;
  const double yaw_c = normal > 0.0 ? cp.yaw_damping : 0.0;
  s.cube_yaw_rate = (s.cube_yaw_rate + dt * cube_torque / inertia) / (1.0 + dt * yaw_c / inertia);
  s.cube_yaw += dt * s.cube_yaw_rate;
  s.time += dt;

  if (!finite(s.cube_pos) || !finite(s.cube_vel) || !std::isfinite(s.cube_yaw) || !finite(s.sphere_pos[0]) ||
      !finite(s.sphere_pos[1]) || !finite(s.sphere_vel[0]) || !finite(s.sphere_vel[1]))
    throw SimulationDiverged("physics_step: non-finite scene state");
  return s;
}

}  // namespace fth::physics
