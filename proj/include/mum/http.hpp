#pragma once

#include <optional>
#include <string>

#include "httplib.h"
#include "mum/parse.hpp"
#include "mum/service.hpp"

namespace mum {

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "ParseError", std::string("request body is not JSON: ") + e.what());
  }
}

}  // namespace detail

/// Routes:
///   POST /sessions                 create {variant, heaps, opponent, policy}
///   GET  /sessions                 ids, plus stored sessions that failed to load
///   GET  /sessions/{id}            session, analysis, legal moves
///   GET  /sessions/{id}/moves      legal moves for the side to move
///   POST /sessions/{id}/moves      play {move, player?}
///   GET  /sessions/{id}/hint       optimal move with its algebra
///   POST /sessions/{id}/ai-move    engine plays for the side to move
///   GET  /sessions/{id}/analysis   current position, or ?heaps=a,b,c preview
/// Files under `static_dir`, when given, are served from /.
inline void register_routes(httplib::Server& server, SessionService& service,
                            const std::optional<std::string>& static_dir = std::nullopt) {
  using httplib::Request;
  using httplib::Response;
  const std::string id = "([^/]+)";

  server.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ServiceError& e) {
      detail::send_json(res, e.status(), e.body());
    } catch (const Error& e) {
      detail::send_json(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
    } catch (const std::exception& e) {
      detail::send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  });

  server.Post("/sessions", [&service](const Request& req, Response& res) {
    detail::send_json(res, 201, service.create(detail::parse_body(req)));
  });
  server.Get("/sessions", [&service](const Request&, Response& res) { detail::send_json(res, 200, service.list()); });
  server.Get("/sessions/" + id, [&service](const Request& req, Response& res) {
    detail::send_json(res, 200, service.get(req.matches[1]));
  });
  server.Get("/sessions/" + id + "/moves", [&service](const Request& req, Response& res) {
    detail::send_json(res, 200, service.moves(req.matches[1]));
  });
  server.Post("/sessions/" + id + "/moves", [&service](const Request& req, Response& res) {
    detail::send_json(res, 200, service.play(req.matches[1], detail::parse_body(req)));
  });
  server.Get("/sessions/" + id + "/hint", [&service](const Request& req, Response& res) {
    detail::send_json(res, 200, service.hint(req.matches[1]));
  });
  server.Post("/sessions/" + id + "/ai-move", [&service](const Request& req, Response& res) {
    detail::send_json(res, 200, service.ai_move(req.matches[1]));
  });
  server.Get("/sessions/" + id + "/analysis", [&service](const Request& req, Response& res) {
    std::optional<std::vector<Heap>> scratch;
    if (req.has_param("heaps")) {
      try {
        scratch = parse_integer_list(req.get_param_value("heaps"));
      } catch (const Error& e) {
        throw ServiceError(400, "ParseError", e.what());
      }
    }
    detail::send_json(res, 200, service.analysis(req.matches[1], scratch));
  });

  if (static_dir) server.set_mount_point("/", *static_dir);
}

}  // namespace mum
