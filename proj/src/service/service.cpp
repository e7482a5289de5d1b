#include "fth/service/service.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "fth/device/device.hpp"
#include "fth/physics/scene.hpp"
#include "fth/physics/task.hpp"
#include "fth/service/gateway.hpp"

namespace fth::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using asio::ip::udp;

namespace {

constexpr device::PeerId kScenePeer = 0;
constexpr device::PeerId kFirstGatewayPeer = 0x80000000u;

struct Datagram {
  device::PeerId peer;
  std::vector<std::uint8_t> bytes;
};
struct Command {
  device::PeerId peer;
  GatewayCommand command;
};
struct Stop {};
using LoopMessage = std::variant<Datagram, Command, Stop>;

// Loop input. Producers are the I/O thread and stop().
class Mailbox {
 public:
  void push(LoopMessage m) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(m));
    }
    cv_.notify_one();
  }

  std::deque<LoopMessage> wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty(); });
    return std::exchange(queue_, {});
  }

  std::deque<LoopMessage> wait_until(std::chrono::steady_clock::time_point deadline) {
    std::unique_lock lock(mu_);
    cv_.wait_until(lock, deadline, [&] { return !queue_.empty(); });
    return std::exchange(queue_, {});
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<LoopMessage> queue_;
};

// Loop output, delivered on the I/O thread.
struct FrameOut {
  std::optional<device::PeerId> peer;
  protocol::Frame frame;
};
struct JsonOut {
  std::optional<device::PeerId> peer;  // unset: every gateway session
  std::string text;
};
using Outgoing = std::variant<FrameOut, JsonOut>;

struct EmbeddedScene {
  physics::Scene scene = physics::Scene::standard();
  physics::ProxyPair proxies{scene.sphere_pos[0], scene.sphere_pos[1]};
  physics::CouplingParams coupling;
  physics::TaskStatus status;
  std::array<double, 2> indentation{0.0, 0.0};
  std::uint32_t seq = 0;
  std::int64_t steps = 0;
};

}  // namespace

class WsSession;

struct Service::Impl {
  explicit Impl(ServiceOptions o) : options(std::move(o)), udp_socket(io), acceptor(io), work(asio::make_work_guard(io)) {}

  ServiceOptions options;
  asio::io_context io;
  udp::socket udp_socket;
  tcp::acceptor acceptor;
  asio::executor_work_guard<asio::io_context::executor_type> work;
  std::thread io_thread;
  std::thread loop_thread;
  Mailbox mailbox;
  std::atomic<bool> running{false};
  std::mutex stop_mu;
  std::condition_variable stop_cv;
  bool stopped = false;

  // I/O-thread state.
  std::map<udp::endpoint, device::PeerId> udp_ids;
  std::map<device::PeerId, udp::endpoint> udp_endpoints;
  std::map<device::PeerId, std::weak_ptr<WsSession>> sessions;
  device::PeerId next_udp = 1;
  device::PeerId next_gateway = kFirstGatewayPeer;
  udp::endpoint recv_from;
  std::array<std::uint8_t, 2048> recv_buf{};

  void start_receive();
  void start_accept();
  void deliver(std::vector<Outgoing> out);
  void send_ws(device::PeerId id, std::shared_ptr<const std::string> text, bool droppable = false);
  void run_loop();
  std::string hello_json() const;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Service::Impl& svc) : ws_(std::move(socket)), svc_(svc) {}

  void run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->svc_.next_gateway++;
      self->svc_.sessions[self->id_] = self;
      self->send(std::make_shared<const std::string>(self->svc_.hello_json()));
      self->read();
    });
  }

  // Streamed messages (telemetry, scene) are dropped for a slow consumer
  // instead of growing the queue without bound; replies never are.
  void send(std::shared_ptr<const std::string> text, bool droppable = false) {
    if (droppable && queue_.size() > 4096) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write_next();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->svc_.sessions.erase(self->id_);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      auto parsed = parse_gateway_message(text, 0);
      if (auto* err = std::get_if<GatewayError>(&parsed)) {
        nlohmann::ordered_json j{{"type", "error"}, {"message", err->message}};
        self->send(std::make_shared<const std::string>(j.dump()));
      } else {
        self->svc_.mailbox.push(Command{self->id_, std::get<GatewayCommand>(std::move(parsed))});
      }
      self->read();
    });
  }

  void write_next() {
    ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->svc_.sessions.erase(self->id_);
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<tcp::socket> ws_;
  Service::Impl& svc_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  device::PeerId id_ = 0;
};

std::string Service::Impl::hello_json() const {
  const auto& d = options.device;
  nlohmann::ordered_json j{{"type", "hello"},
                           {"clock", d.clock.to_string()},
                           {"rates",
                            {{"control_hz", d.rates.control_hz},
                             {"sensing_hz", d.rates.sensing_hz},
                             {"telemetry_hz", d.rates.telemetry_hz}}},
                           {"scene", options.embedded_scene}};
  return j.dump();
}

void Service::Impl::start_receive() {
  udp_socket.async_receive_from(asio::buffer(recv_buf), recv_from, [this](boost::system::error_code ec, std::size_t n) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) {
      auto [it, inserted] = udp_ids.try_emplace(recv_from, next_udp);
      if (inserted) {
        udp_endpoints[next_udp] = recv_from;
        ++next_udp;
      }
      mailbox.push(Datagram{it->second, std::vector<std::uint8_t>(recv_buf.begin(), recv_buf.begin() + n)});
    }
    start_receive();
  });
}

void Service::Impl::start_accept() {
  acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) std::make_shared<WsSession>(std::move(socket), *this)->run();
    start_accept();
  });
}

void Service::Impl::send_ws(device::PeerId id, std::shared_ptr<const std::string> text, bool droppable) {
  const auto it = sessions.find(id);
  if (it == sessions.end()) return;
  if (auto s = it->second.lock()) s->send(std::move(text), droppable);
}

void Service::Impl::deliver(std::vector<Outgoing> out) {
  for (auto& item : out) {
    if (auto* f = std::get_if<FrameOut>(&item)) {
      auto bytes = std::make_shared<const std::vector<std::uint8_t>>(protocol::encode(f->frame));
      auto text = std::make_shared<const std::string>(frame_to_json(f->frame).dump());
      auto to_udp = [&](const udp::endpoint& ep) {
        udp_socket.async_send_to(asio::buffer(*bytes), ep, [bytes](boost::system::error_code, std::size_t) {});
      };
      if (f->peer) {
        if (const auto it = udp_endpoints.find(*f->peer); it != udp_endpoints.end()) to_udp(it->second);
        else send_ws(*f->peer, text);
      } else {
        for (const auto& [id, ep] : udp_endpoints) to_udp(ep);
        for (const auto& [id, s] : sessions) send_ws(id, text, true);
      }
    } else {
      auto& j = std::get<JsonOut>(item);
      auto text = std::make_shared<const std::string>(std::move(j.text));
      if (j.peer) send_ws(*j.peer, text);
      else
        for (const auto& [id, s] : sessions) send_ws(id, text, true);
    }
  }
}

void Service::Impl::run_loop() {
  device::Device dev(options.device);
  std::optional<EmbeddedScene> scene;
  if (options.embedded_scene) scene.emplace();
  const auto period_us = options.device.rates.control_period_us();
  const double period_s = static_cast<double>(period_us) * 1e-6;
  const int substeps = std::max(1, static_cast<int>(std::lround(period_s / 0.001)));
  const double physics_dt = period_s / substeps;
  const auto kind = options.device.clock.kind;

  std::vector<Outgoing> out;
  auto flush = [&] {
    if (out.empty()) return;
    asio::post(io, [this, batch = std::move(out)]() mutable { deliver(std::move(batch)); });
    out.clear();
  };

  auto tick = [&] {
    if (scene) {
      auto& s = *scene;
      for (int k = 0; k < substeps; ++k) {
        s.scene = physics::physics_step(s.scene, s.proxies, s.coupling, physics_dt);
        ++s.steps;
        s.status = physics::task_step(s.status, s.scene, static_cast<double>(s.steps) * physics_dt);
      }
      for (int i = 0; i < 2; ++i)
        s.indentation[i] = physics::contact_indentation(s.proxies[i], s.scene.sphere_pos[i], s.scene.contact_flags[i]);
      protocol::Frame f;
      f.seq = s.seq++;
      f.timestamp_us = dev.state().time_us(dev.config().rates);
      f.payload = protocol::IndentationUpdate{static_cast<float>(s.indentation[0]), static_cast<float>(s.indentation[1])};
      dev.receive(kScenePeer, f);
    }
    bool telemetry = false;
    for (auto& o : dev.tick()) {
      telemetry = telemetry || o.frame.type() == protocol::MessageType::Telemetry;
      out.push_back(FrameOut{o.peer, std::move(o.frame)});
    }
    if (scene && telemetry)
      out.push_back(JsonOut{std::nullopt, scene_to_json({&scene->scene, &scene->proxies, &scene->status, scene->indentation}).dump()});
  };

  auto error_to = [&](device::PeerId peer, std::string message) {
    out.push_back(JsonOut{peer, nlohmann::ordered_json{{"type", "error"}, {"message", std::move(message)}}.dump()});
  };

  // Returns false on Stop.
  auto handle = [&](std::deque<LoopMessage>& msgs) {
    for (auto& m : msgs) {
      if (std::holds_alternative<Stop>(m)) return false;
      if (auto* d = std::get_if<Datagram>(&m)) {
        dev.receive(d->peer, d->bytes);
        continue;
      }
      auto& c = std::get<Command>(m);
      if (auto* fc = std::get_if<FrameCommand>(&c.command)) {
        if (fc->frame.timestamp_us == 0) fc->frame.timestamp_us = dev.state().time_us(dev.config().rates);
        dev.receive(c.peer, fc->frame);
      } else if (auto* sc = std::get_if<StepCommand>(&c.command)) {
        if (kind != device::ClockKind::Stepped) {
          error_to(c.peer, "step is only accepted with the stepped clock");
          continue;
        }
        try {
          for (std::uint32_t i = 0; i < sc->ticks; ++i) tick();
        } catch (const std::exception& e) {
          error_to(c.peer, e.what());
        }
        out.push_back(JsonOut{c.peer, nlohmann::ordered_json{{"type", "stepped"},
                                                             {"tick", dev.state().tick},
                                                             {"time_us", dev.state().time_us(dev.config().rates)}}
                                          .dump()});
      } else if (auto* pc = std::get_if<ProxiesCommand>(&c.command)) {
        if (!scene) error_to(c.peer, "no embedded scene");
        else scene->proxies = pc->proxies;
      } else if (std::holds_alternative<ResetSceneCommand>(c.command)) {
        if (!scene) error_to(c.peer, "no embedded scene");
        else scene.emplace();
      }
    }
    return true;
  };

  using clock = std::chrono::steady_clock;
  const double factor = kind == device::ClockKind::Accelerated ? options.device.clock.factor : 1.0;
  const auto wall_period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(period_s / factor));
  auto deadline = clock::now() + wall_period;
  while (true) {
    std::deque<LoopMessage> msgs = kind == device::ClockKind::Stepped ? mailbox.wait() : mailbox.wait_until(deadline);
    if (!handle(msgs)) break;
    if (kind != device::ClockKind::Stepped && clock::now() >= deadline) {
      try {
        tick();
      } catch (const std::exception& e) {
        out.push_back(JsonOut{std::nullopt, nlohmann::ordered_json{{"type", "error"}, {"message", e.what()}}.dump()});
      }
      deadline += wall_period;
      // After a stall, resume pacing from now rather than bursting.
      if (clock::now() - deadline > std::chrono::milliseconds(100)) deadline = clock::now() + wall_period;
    }
    flush();
  }
  flush();
}

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

void Service::start() {
  auto& m = *impl_;
  m.options.device.validate();
  const auto addr = asio::ip::make_address(m.options.bind_address);
  m.udp_socket.open(addr.is_v4() ? udp::v4() : udp::v6());
  m.udp_socket.bind(udp::endpoint(addr, m.options.udp_port));
  const tcp::endpoint ep(addr, m.options.gateway_port);
  m.acceptor.open(ep.protocol());
  m.acceptor.set_option(asio::socket_base::reuse_address(true));
  m.acceptor.bind(ep);
  m.acceptor.listen();
  m.start_receive();
  m.start_accept();
  m.running = true;
  m.io_thread = std::thread([&m] { m.io.run(); });
  m.loop_thread = std::thread([&m] { m.run_loop(); });
}

void Service::stop() {
  auto& m = *impl_;
  if (!m.running.exchange(false)) return;
  m.mailbox.push(Stop{});
  if (m.loop_thread.joinable()) m.loop_thread.join();
  asio::post(m.io, [&m] {
    boost::system::error_code ec;
    m.udp_socket.close(ec);
    m.acceptor.close(ec);
  });
  m.work.reset();
  m.io.stop();
  if (m.io_thread.joinable()) m.io_thread.join();
  {
    std::lock_guard lock(m.stop_mu);
    m.stopped = true;
  }
  m.stop_cv.notify_all();
}

void Service::wait() {
  std::unique_lock lock(impl_->stop_mu);
  impl_->stop_cv.wait(lock, [&] { return impl_->stopped; });
}

std::uint16_t Service::udp_port() const { return impl_->udp_socket.local_endpoint().port(); }
std::uint16_t Service::gateway_port() const { return impl_->acceptor.local_endpoint().port(); }

}  // namespace fth::service
