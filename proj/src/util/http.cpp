#include "infodensity/util/http.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "infodensity/error.hpp"

namespace infodensity {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ValidationError(fmt::format("URL '{}' has no scheme", url));
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = url;
    } else {
        out.origin = url.substr(0, path_start);
        out.prefix = url.substr(path_start);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

} // namespace

HttpResponse post_json(const std::string& base_url, const std::string& path,
                       const std::string& body,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       const RetryPolicy& policy) {
    const auto url = split_url(base_url);
    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    std::string last_error;
    auto backoff = policy.initial_backoff;
    for (std::size_t attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto res = client.Post(url.prefix + path, hdrs, body, "application/json");
        if (!res) {
            last_error = fmt::format("POST {}{}: {}", base_url, path, httplib::to_string(res.error()));
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = fmt::format("POST {}{}: HTTP {}", base_url, path, res->status);
            continue;
        }
        return HttpResponse{res->status, res->body};
    }
    throw ProviderError(fmt::format("{} (after {} retries)", last_error, policy.max_retries));
}

} // namespace infodensity
