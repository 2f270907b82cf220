#include <lexgraph/http_provider.hpp>

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <stdexcept>

namespace lexgraph::quality {

using nlohmann::json;

HttpCompletionProvider::HttpCompletionProvider(std::string endpoint, std::string model,
                                               TraceSink trace)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), trace_(std::move(trace)) {
    if (endpoint_.empty()) {
        throw std::invalid_argument("completion endpoint must not be empty");
    }
}

std::string HttpCompletionProvider::complete(const std::string& prompt) {
    json request{{"model", model_},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    const std::string body = request.dump();

    httplib::Client client(endpoint_);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("LEXGRAPH_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
    if (!res) {
        throw std::runtime_error("completion request failed: " +
                                 httplib::to_string(res.error()));
    }
    if (trace_) {
        trace_(body, res->body);
    }
    if (res->status != 200) {
        throw std::runtime_error("completion request returned HTTP " +
                                 std::to_string(res->status));
    }
    try {
        json response = json::parse(res->body);
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed completion response: ") + e.what());
    }
}

} // namespace lexgraph::quality
