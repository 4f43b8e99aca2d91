#include <cstdlib>

#include <fmt/format.h>

#include "infodensity/error.hpp"
#include "infodensity/modeleval/modeleval.hpp"
#include "infodensity/util/hash.hpp"
#include "infodensity/util/http.hpp"

namespace infodensity::modeleval {

void ModelEndpoint::validate() const {
    if (name.empty()) throw ValidationError("model endpoint needs a name");
    if (base_url.empty()) throw ValidationError(fmt::format("model endpoint '{}' needs base_url", name));
    if (model_id.empty()) throw ValidationError(fmt::format("model endpoint '{}' needs model_id", name));
    if (max_concurrency < 1)
        throw ValidationError(fmt::format("model endpoint '{}': max_concurrency must be >= 1", name));
    if (temperature < 0.0)
        throw ValidationError(fmt::format("model endpoint '{}': temperature must be >= 0", name));
}

Json to_json(const ModelEndpoint& e) {
    return Json{{"name", e.name},
                {"base_url", e.base_url},
                {"model_id", e.model_id},
                {"auth_env", e.auth_env},
                {"max_concurrency", e.max_concurrency},
                {"temperature", e.temperature},
                {"timeout_ms", e.timeout.count()},
                {"max_retries", e.max_retries}};
}

ModelEndpoint endpoint_from_json(const Json& j) {
    ModelEndpoint e;
    e.name = j.at("name").get<std::string>();
    e.base_url = j.at("base_url").get<std::string>();
    e.model_id = j.at("model_id").get<std::string>();
    e.auth_env = j.value("auth_env", "");
    e.max_concurrency = j.value("max_concurrency", std::size_t{4});
    e.temperature = j.value("temperature", 0.7);
    e.timeout = std::chrono::milliseconds(j.value("timeout_ms", std::int64_t{60000}));
    e.max_retries = j.value("max_retries", std::size_t{3});
    e.validate();
    return e;
}

namespace {

std::string image_mime(const std::string& bytes) {
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
        static_cast<unsigned char>(bytes[1]) == 0xD8)
        return "image/jpeg";
    return "image/png";
}

class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(ModelEndpoint endpoint) : endpoint_(std::move(endpoint)) {
        endpoint_.validate();
        if (!endpoint_.auth_env.empty()) {
            const char* token = std::getenv(endpoint_.auth_env.c_str());
            if (!token || !*token)
                throw ValidationError(fmt::format("environment variable {} (auth for '{}') is not set",
                                                  endpoint_.auth_env, endpoint_.name));
            token_ = token;
        }
    }

    std::string complete(const ChatRequest& request) override {
        std::vector<std::pair<std::string, std::string>> headers;
        if (!token_.empty()) headers.emplace_back("Authorization", "Bearer " + token_);
        RetryPolicy policy;
        policy.max_retries = endpoint_.max_retries;
        policy.timeout = endpoint_.timeout;
        const auto res = post_json(endpoint_.base_url, "/chat/completions", chat_request_body(request).dump(),
                                   headers, policy);
        if (res.status < 200 || res.status >= 300)
            throw ProviderError(fmt::format("{}: HTTP {}", endpoint_.name, res.status));
        try {
            const auto doc = Json::parse(res.body);
            const auto& content = doc.at("choices").at(0).at("message").at("content");
            if (content.is_string()) return content.get<std::string>();
            // Some servers return content parts.
            std::string text;
            for (const auto& part : content)
                if (part.value("type", "") == "text") text += part.value("text", "");
            return text;
        } catch (const Json::exception& e) {
            throw ProviderError(fmt::format("{}: malformed completion response: {}", endpoint_.name, e.what()));
        }
    }

private:
    ModelEndpoint endpoint_;
    std::string token_;
};

} // namespace

Json chat_request_body(const ChatRequest& request) {
    Json messages = Json::array();
    bool image_attached = false;
    for (const auto& m : request.messages) {
        if (m.role == "user" && request.image && !image_attached) {
            const auto url = fmt::format("data:{};base64,{}", image_mime(*request.image), base64_encode(*request.image));
            messages.push_back(Json{{"role", m.role},
                                    {"content", Json::array({Json{{"type", "text"}, {"text", m.text}},
                                                             Json{{"type", "image_url"},
                                                                  {"image_url", Json{{"url", url}}}}})}});
            image_attached = true;
        } else {
            messages.push_back(Json{{"role", m.role}, {"content", m.text}});
        }
    }
    return Json{{"model", request.model_id},
                {"messages", std::move(messages)},
                {"temperature", request.temperature},
                {"seed", request.seed}};
}

std::shared_ptr<ChatClient> make_http_chat_client(const ModelEndpoint& endpoint) {
    return std::make_shared<HttpChatClient>(endpoint);
}

} // namespace infodensity::modeleval
