#include "ald/station/bridge.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ald/station/png.hpp"

namespace ald::station {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

// ---- pure message helpers -------------------------------------------------

namespace {

std::optional<control::SafetyAction> safety_of(std::string_view word) {
  if (word == "emergency") return control::SafetyAction::Emergency;
  if (word == "land") return control::SafetyAction::Land;
  if (word == "takeoff") return control::SafetyAction::Takeoff;
  return std::nullopt;
}

bool is_toggle_key(std::string_view key) {
  return key.size() == 1 && std::string_view("gklfr").find(key[0]) != std::string_view::npos;
}

std::optional<control::KeyState> held_from(const json& j) {
  if (!j.is_object()) return std::nullopt;
  static const std::set<std::string> names{"RIGHT", "LEFT", "UP", "DOWN", "w", "s", "d", "a"};
  for (auto& [name, value] : j.items()) {
    if (!names.count(name) || !value.is_boolean()) return std::nullopt;
  }
  control::KeyState k;
  k.right = j.value("RIGHT", false);
  k.left = j.value("LEFT", false);
  k.up = j.value("UP", false);
  k.down = j.value("DOWN", false);
  k.w = j.value("w", false);
  k.s = j.value("s", false);
  k.d = j.value("d", false);
  k.a = j.value("a", false);
  return k;
}

}  // namespace

std::optional<Inbound> parse_inbound(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("kind") || !j.contains("payload")) {
    return std::nullopt;
  }
  if (!j["kind"].is_string()) return std::nullopt;
  const std::string kind = j["kind"];
  const json& p = j["payload"];
  Inbound in;

  if (kind == "mode") {
    if (!p.is_object() || !p.contains("toggle") || !p["toggle"].is_string()) return std::nullopt;
    const std::string key = p["toggle"];
    if (!is_toggle_key(key)) return std::nullopt;
    in.pressed = key;
    return in;
  }
  if (kind != "command") return std::nullopt;

  if (p.is_string()) {
    in.safety = safety_of(p.get<std::string>());
    if (!in.safety) return std::nullopt;
    return in;
  }
  if (!p.is_object() || p.size() != 1) return std::nullopt;
  if (p.contains("keys")) {
    in.held = held_from(p["keys"]);
    if (!in.held) return std::nullopt;
  } else if (p.contains("key")) {
    if (!p["key"].is_string()) return std::nullopt;
    const std::string key = p["key"];
    if (key == "p") in.safety = control::SafetyAction::Emergency;
    else if (key == "q") in.safety = control::SafetyAction::Land;
    else if (key == "e") in.safety = control::SafetyAction::Takeoff;
    else if (is_toggle_key(key)) in.pressed = key;
    else return std::nullopt;
  } else if (p.contains("gesture")) {
    if (p["gesture"].is_null()) in.gesture = std::string();
    else if (p["gesture"].is_string()) in.gesture = p["gesture"].get<std::string>();
    else return std::nullopt;
  } else {
    return std::nullopt;
  }
  return in;
}

json telemetry_payload(const protocol::Telemetry& t) {
  return {{"pitch", t.pitch},   {"roll", t.roll},       {"yaw", t.yaw_deg},
          {"h", t.height},      {"bat", t.battery},     {"templ", t.temp_low},
          {"temph", t.temp_high}, {"time", t.flight_time}};
}

json make_status(const StatusView& v) {
  const auto& s = v.state;
  json boxes = json::array();
  for (const auto& b : v.boxes) boxes.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
  json out = {
      {"modes",
       {{"followme", s.followme},
        {"gestures", s.gestures},
        {"findfaces", s.findfaces},
        {"streaming", s.streaming},
        {"recording", s.recording}}},
      {"osd",
       {{"follow", s.followme ? kFollowOn : kFollowOff},
        {"gesture", s.gestures ? kGestureOn : kGestureOff},
        {"temp_label", kTempLabel},
        {"faces_label", kFacesLabel}}},
      {"faces", v.faces},
      {"boxes", boxes},
      {"flying", v.flying},
      {"connected", v.connected},
  };
  if (v.telemetry) {
    out["temperature"] = v.telemetry->temp_high;
    out["overheat_warning"] = v.telemetry->temp_high >= kOverheatWarning;
  } else {
    out["temperature"] = nullptr;
    out["overheat_warning"] = false;
  }
  return out;
}

std::string envelope(std::uint64_t seq, std::string_view kind, std::string_view payload_json) {
  std::string out;
  out.reserve(payload_json.size() + kind.size() + 48);
  out += "{\"seq\":";
  out += std::to_string(seq);
  out += ",\"kind\":\"";
  out += kind;
  out += "\",\"payload\":";
  out += payload_json;
  out += '}';
  return out;
}

// ---- server ----------------------------------------------------------------

namespace {

struct Outgoing {
  std::string kind;
  std::shared_ptr<const std::string> payload;  // serialized JSON
};

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

class WsSession;

class Bridge::Impl {
 public:
  explicit Impl(BridgeOptions options) : options_(std::move(options)), acceptor_(ioc_) {}

  void start();
  void stop();
  void broadcast(Outgoing message, bool droppable);
  void remove(WsSession* s);
  void add(std::shared_ptr<WsSession> s);
  void handle_inbound(const std::string& text);
  void encode_loop();

  BridgeOptions options_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::thread io_thread_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopped_{false};

  mutable std::mutex sessions_mutex_;
  std::set<std::shared_ptr<WsSession>> sessions_;
  std::atomic<std::uint64_t> frames_dropped_{0};
  std::atomic<std::uint64_t> inbound_rejected_{0};

  std::mutex input_mutex_;
  control::KeyState held_;
  std::string pressed_;
  std::optional<std::string> gesture_;
  std::function<void()> emergency_;

  // frame encoding runs off both the control and the I/O thread
  std::mutex encode_mutex_;
  std::condition_variable encode_cv_;
  std::optional<std::pair<vision::Frame, std::uint64_t>> encode_slot_;
  bool encode_stop_ = false;
  std::thread encode_thread_;
  std::chrono::steady_clock::time_point last_frame_{};

  void accept();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Bridge::Impl* owner) : ws_(std::move(socket)), owner_(owner) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->owner_->add(self);
      self->read();
    });
  }

  // Runs on the I/O thread.
  void deliver(const Outgoing& m, bool droppable) {
    if (closed_) return;
    if (droppable) {
      if (pending_frame_) owner_->frames_dropped_.fetch_add(1);
      pending_frame_ = m;
    } else {
      queue_.push_back(m);
    }
    write_next();
  }

  void close() {
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->drop();
      self->owner_->handle_inbound(beast::buffers_to_string(self->buffer_.data()));
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write_next() {
    if (writing_ || closed_) return;
    Outgoing m;
    if (!queue_.empty()) {
      m = std::move(queue_.front());
      queue_.pop_front();
    } else if (pending_frame_) {
      m = std::move(*pending_frame_);
      pending_frame_.reset();
    } else {
      return;
    }
    writing_ = true;
    current_ = std::make_shared<std::string>(envelope(++seq_, m.kind, *m.payload));
    ws_.text(true);
    ws_.async_write(net::buffer(*current_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) return self->drop();
                      self->write_next();
                    });
  }

  void drop() {
    if (closed_) return;
    closed_ = true;
    owner_->remove(this);
  }

  websocket::stream<beast::tcp_stream> ws_;
  Bridge::Impl* owner_;
  beast::flat_buffer buffer_;
  std::deque<Outgoing> queue_;
  std::optional<Outgoing> pending_frame_;
  std::shared_ptr<std::string> current_;
  std::uint64_t seq_ = 0;
  bool writing_ = false;
  bool closed_ = false;
};

// Plain HTTP: one request, then either hand over to a websocket or serve a file.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Bridge::Impl* owner) : stream_(std::move(socket)), owner_(owner) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

 private:
  void on_request() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), owner_)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(respond());
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  http::response<http::string_body> respond() {
    http::response<http::string_body> res{http::status::not_found, req_.version()};
    res.set(http::field::content_type, "text/plain");
    res.keep_alive(false);
    std::string target(req_.target());
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (req_.method() != http::verb::get || owner_->options_.ui_dir.empty() ||
        target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
      res.body() = "not found\n";
      res.prepare_payload();
      return res;
    }
    if (target.back() == '/') target += "index.html";
    const auto path = owner_->options_.ui_dir / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      res.body() = "not found\n";
      res.prepare_payload();
      return res;
    }
    std::ostringstream body;
    body << in.rdbuf();
    res.result(http::status::ok);
    res.set(http::field::content_type, std::string(mime_type(path)));
    res.body() = body.str();
    res.prepare_payload();
    return res;
  }

  beast::tcp_stream stream_;
  Bridge::Impl* owner_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void Bridge::Impl::start() {
  const tcp::endpoint ep(net::ip::make_address(options_.address), options_.port);
  acceptor_.open(ep.protocol());
  acceptor_.set_option(net::socket_base::reuse_address(true));
  acceptor_.bind(ep);
  acceptor_.listen();
  port_ = acceptor_.local_endpoint().port();
  accept();
  io_thread_ = std::thread([this] { ioc_.run(); });
  encode_thread_ = std::thread([this] { encode_loop(); });
}

void Bridge::Impl::accept() {
  acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpSession>(std::move(socket), this)->start();
    accept();
  });
}

void Bridge::Impl::stop() {
  if (stopped_.exchange(true)) return;
  {
    std::lock_guard lock(encode_mutex_);
    encode_stop_ = true;
  }
  encode_cv_.notify_all();
  if (encode_thread_.joinable()) encode_thread_.join();

  net::post(ioc_, [this] {
    beast::error_code ec;
    acceptor_.close(ec);
    std::set<std::shared_ptr<WsSession>> sessions;
    {
      std::lock_guard lock(sessions_mutex_);
      sessions.swap(sessions_);
    }
    for (auto& s : sessions) s->close();
    ioc_.stop();
  });
  if (io_thread_.joinable()) io_thread_.join();
}

void Bridge::Impl::add(std::shared_ptr<WsSession> s) {
  std::lock_guard lock(sessions_mutex_);
  sessions_.insert(std::move(s));
}

void Bridge::Impl::remove(WsSession* s) {
  std::lock_guard lock(sessions_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end(); ++it) {
    if (it->get() == s) {
      sessions_.erase(it);
      return;
    }
  }
}

void Bridge::Impl::broadcast(Outgoing message, bool droppable) {
  if (stopped_) return;
  net::post(ioc_, [this, message = std::move(message), droppable] {
    std::vector<std::shared_ptr<WsSession>> targets;
    {
      std::lock_guard lock(sessions_mutex_);
      targets.assign(sessions_.begin(), sessions_.end());
    }
    for (auto& s : targets) s->deliver(message, droppable);
  });
}

void Bridge::Impl::handle_inbound(const std::string& text) {
  const auto in = parse_inbound(text);
  if (!in) {
    inbound_rejected_.fetch_add(1);
    return;
  }
  std::function<void()> urgent;
  {
    std::lock_guard lock(input_mutex_);
    if (in->safety) {
      switch (*in->safety) {
        case control::SafetyAction::Emergency:
          urgent = emergency_;
          pressed_ += 'p';
          break;
        case control::SafetyAction::Land: pressed_ += 'q'; break;
        case control::SafetyAction::Takeoff: pressed_ += 'e'; break;
      }
    }
    if (in->held) held_ = *in->held;
    pressed_ += in->pressed;
    if (in->gesture) {
      if (in->gesture->empty()) gesture_.reset();
      else gesture_ = *in->gesture;
    }
  }
  if (urgent) urgent();
}

void Bridge::Impl::encode_loop() {
  while (true) {
    std::pair<vision::Frame, std::uint64_t> job;
    {
      std::unique_lock lock(encode_mutex_);
      encode_cv_.wait(lock, [this] { return encode_slot_ || encode_stop_; });
      if (encode_stop_) return;
      job = std::move(*encode_slot_);
      encode_slot_.reset();
    }
    json payload = {{"index", job.second},
                    {"width", job.first.width},
                    {"height", job.first.height},
                    {"png", base64_encode(encode_png(job.first))}};
    broadcast({"frame", std::make_shared<const std::string>(payload.dump())}, true);
  }
}

// ---- public facade -----------------------------------------------------------

Bridge::Bridge(BridgeOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {
  if (impl_->options_.max_frame_rate <= 0.0) throw std::invalid_argument("frame rate must be positive");
  impl_->start();
}

Bridge::~Bridge() { stop(); }

void Bridge::stop() { impl_->stop(); }

std::uint16_t Bridge::port() const noexcept { return impl_->port_; }

void Bridge::publish_telemetry(const protocol::Telemetry& t) {
  impl_->broadcast({"telemetry", std::make_shared<const std::string>(telemetry_payload(t).dump())},
                   false);
}

void Bridge::publish_status(const json& status) {
  impl_->broadcast({"status", std::make_shared<const std::string>(status.dump())}, false);
}

void Bridge::publish_command(std::string_view text) {
  impl_->broadcast({"command", std::make_shared<const std::string>(json(text).dump())}, false);
}

bool Bridge::publish_frame(const vision::Frame& frame, std::uint64_t index) {
  if (clients() == 0) return false;
  const auto now = std::chrono::steady_clock::now();
  const auto gap = std::chrono::duration<double>(1.0 / impl_->options_.max_frame_rate);
  {
    std::lock_guard lock(impl_->encode_mutex_);
    if (impl_->last_frame_ != std::chrono::steady_clock::time_point{} &&
        now - impl_->last_frame_ < gap) {
      return false;
    }
    impl_->last_frame_ = now;
    if (impl_->encode_slot_) impl_->frames_dropped_.fetch_add(1);
    impl_->encode_slot_.emplace(frame, index);
  }
  impl_->encode_cv_.notify_one();
  return true;
}

void Bridge::on_emergency(std::function<void()> handler) {
  std::lock_guard lock(impl_->input_mutex_);
  impl_->emergency_ = std::move(handler);
}

Bridge::Input Bridge::take_input() {
  std::lock_guard lock(impl_->input_mutex_);
  Input out{impl_->held_, impl_->gesture_};
  out.keys.pressed = std::exchange(impl_->pressed_, {});
  return out;
}

std::size_t Bridge::clients() const {
  std::lock_guard lock(impl_->sessions_mutex_);
  return impl_->sessions_.size();
}

std::uint64_t Bridge::frames_dropped() const { return impl_->frames_dropped_.load(); }

std::uint64_t Bridge::inbound_rejected() const { return impl_->inbound_rejected_.load(); }

}  // namespace ald::station
