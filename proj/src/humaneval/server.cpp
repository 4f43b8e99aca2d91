#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "infodensity/humaneval/humaneval.hpp"
#include "infodensity/util/hash.hpp"

namespace infodensity::humaneval {

struct AnnotationServer::Impl {
    AnnotationService& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(AnnotationService& s) : service(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, Json{{"error", message}});
}

// Runs fn, mapping domain errors to HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const ConflictError& e) {
        send_error(res, 409, e.what());
    } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
    } catch (const ValidationError& e) {
        send_error(res, 400, e.what());
    } catch (const Json::exception& e) {
        send_error(res, 400, fmt::format("malformed JSON: {}", e.what()));
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

} // namespace

AnnotationServer::AnnotationServer(AnnotationService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svc = impl_->service;
    auto& srv = impl_->server;

    srv.Get(R"(/api/session/([^/]+)/next)", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto annotator = req.matches[1].str();
            const auto task = svc.next(annotator);
            const auto done = svc.store().count_for(annotator);
            if (!task) {
                send_json(res, 200, Json{{"exhausted", true}, {"completed", done}, {"total", svc.size()}});
                return;
            }
            send_json(res, 200,
                      Json{{"exhausted", false}, {"completed", done}, {"total", svc.size()}, {"task", svc.task_json(*task)}});
        });
    });

    srv.Post("/api/label", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            svc.submit(annotation_from_json(Json::parse(req.body)));
            send_json(res, 200, Json{{"ok", true}});
        });
    });

    srv.Post("/api/diversity", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            svc.submit(diversity_annotation_from_json(Json::parse(req.body)));
            send_json(res, 200, Json{{"ok", true}});
        });
    });

    srv.Get("/api/progress", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, svc.progress()); });
    });

    srv.Get("/api/export", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(svc.store().export_text(), "application/x-ndjson"); });
    });

    srv.Get(R"(/api/image/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto* task = svc.find(req.matches[1].str());
            if (!task) throw NotFoundError(fmt::format("unknown sample '{}'", req.matches[1].str()));
            const auto bytes = read_file_bytes(task->sample->image_path.string());
            const bool jpeg = bytes.size() > 2 && static_cast<unsigned char>(bytes[0]) == 0xFF;
            res.set_content(bytes, jpeg ? "image/jpeg" : "image/png");
        });
    });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start(const std::string& host, int port) {
    auto& srv = impl_->server;
    const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw ValidationError(fmt::format("cannot bind {}:{}", host, port));
    impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    return bound;
}

void AnnotationServer::listen(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) throw ValidationError(fmt::format("cannot listen on {}:{}", host, port));
}

void AnnotationServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace infodensity::humaneval
