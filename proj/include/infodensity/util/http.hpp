#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace infodensity {

struct HttpResponse {
    int status = 0;
    std::string body;
};

struct RetryPolicy {
    std::size_t max_retries = 3;
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::milliseconds timeout{30000};
};

/// POSTs a JSON body to base_url + path. base_url may carry a path prefix
/// ("http://host:8080/v1"). Transport failures, 429 and 5xx are retried with
/// exponential backoff; the last failure throws ProviderError. Other
/// statuses are returned to the caller.
HttpResponse post_json(const std::string& base_url, const std::string& path,
                       const std::string& body,
                       const std::vector<std::pair<std::string, std::string>>& headers,
                       const RetryPolicy& policy);

} // namespace infodensity
