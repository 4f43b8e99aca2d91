#pragma once

#include <string>
#include <thread>

#include <httplib.h>

namespace fixtures {

/// httplib server on an ephemeral 127.0.0.1 port; register handlers, then start().
struct LoopbackServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LoopbackServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

} // namespace fixtures
