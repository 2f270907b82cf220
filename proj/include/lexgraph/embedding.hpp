#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>
#include <iosfwd>

namespace lexgraph {

/// Anything that can turn free text into a fixed-dimension vector.
/// Implementations must tolerate concurrent calls.
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::optional<std::vector<double>> embed(std::string_view text) const = 0;
};

/// Token-vector table loaded from a ".vectors.tsv" file (token, TAB,
/// comma-separated components). Free text embeds as the mean of the
/// vectors of its known tokens; text with no known token embeds to nothing.
class EmbeddingTable final : public TextEmbedder {
public:
    EmbeddingTable() = default;

    static EmbeddingTable fromStream(std::istream& in);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    const std::vector<double>* lookup(const std::string& token) const;
    std::optional<std::vector<double>> embed(std::string_view text) const override;

private:
    std::unordered_map<std::string, std::vector<double>> vectors_;
    std::size_t dimension_ = 0;
};

} // namespace lexgraph
