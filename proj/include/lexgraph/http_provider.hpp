#pragma once

#include <lexgraph/quality.hpp>

#include <functional>
#include <string>

namespace lexgraph::quality {

/// JSON-over-HTTP chat-completion adapter. Sends the prompt as a single
/// user message to <endpoint>/v1/chat/completions and returns the first
/// choice's message content. The API key is read from the LEXGRAPH_API_KEY
/// environment variable; requests carry it as a bearer token when set.
class HttpCompletionProvider final : public CompletionProvider {
public:
    /// Called with the request and response bodies of every exchange when
    /// tracing is enabled.
    using TraceSink = std::function<void(const std::string& request_body,
                                         const std::string& response_body)>;

    HttpCompletionProvider(std::string endpoint, std::string model, TraceSink trace = nullptr);

    std::string complete(const std::string& prompt) override;

private:
    std::string endpoint_;    ///< e.g. "http://localhost:8089"
    std::string model_;
    TraceSink trace_;
};

} // namespace lexgraph::quality
