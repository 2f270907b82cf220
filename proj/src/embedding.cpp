#include <lexgraph/embedding.hpp>

#include <lexgraph/text.hpp>

#include <istream>
#include <sstream>
#include <stdexcept>

namespace lexgraph {

EmbeddingTable EmbeddingTable::fromStream(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("vectors line " + std::to_string(line_no) +
                                     ": expected 'token<TAB>v1,v2,...'");
        }
        std::string token = asciiLower(line.substr(0, tab));
        std::vector<double> vec;
        std::stringstream rest(line.substr(tab + 1));
        std::string part;
        while (std::getline(rest, part, ',')) {
            vec.push_back(std::stod(part));
        }
        if (vec.empty()) {
            throw std::runtime_error("vectors line " + std::to_string(line_no) +
                                     ": empty vector");
        }
        if (table.dimension_ == 0) {
            table.dimension_ = vec.size();
        } else if (vec.size() != table.dimension_) {
            throw std::runtime_error("vectors line " + std::to_string(line_no) +
                                     ": dimension mismatch");
        }
        table.vectors_[token] = std::move(vec);
    }
    return table;
}

const std::vector<double>* EmbeddingTable::lookup(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<std::vector<double>> EmbeddingTable::embed(std::string_view text) const {
    if (dimension_ == 0) {
        return std::nullopt;
    }
    std::vector<double> sum(dimension_, 0.0);
    std::size_t hits = 0;
    for (const auto& token : tokenize(text)) {
        if (const auto* vec = lookup(token)) {
            for (std::size_t i = 0; i < dimension_; ++i) {
                sum[i] += (*vec)[i];
            }
            ++hits;
        }
    }
    if (hits == 0) {
        return std::nullopt;
    }
    for (auto& v : sum) {
        v /= static_cast<double>(hits);
    }
    return sum;
}

} // namespace lexgraph
