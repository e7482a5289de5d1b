#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "fth/device/config.hpp"

namespace fth::service {

struct ServiceOptions {
  device::DeviceConfig device;
  std::string bind_address = "127.0.0.1";
  std::uint16_t udp_port = 9750;      // 0 picks a free port
  std::uint16_t gateway_port = 9751;  // 0 picks a free port
  bool embedded_scene = false;        // run the pick-and-place scene in the loop
};

// The emulator as a network service. One control-loop thread owns the
// device (and scene); one I/O thread runs the datagram socket and the
// websocket gateway. They exchange messages only.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds both sockets and starts the threads. Throws on bind failure.
  void start();
  // Idempotent; joins the threads.
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

  std::uint16_t udp_port() const;
  std::uint16_t gateway_port() const;

 private:
  friend class WsSession;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fth::service
