#pragma once

// Query result documents.
//
// Machine form (JSON, shortest round-trip reals, keys sorted):
//   { "members": [{"id","dim","offset"}...], "mean": [...], "cov": [[...]],
//     "links": [{"id": ..., "K": [[...]]}...], "diagnostics": {...} }
// Human form: aligned tables rounded to 6 significant digits.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lgspi/query_engine.hpp"

namespace lgspi {

enum class OutputFormat { Human, Machine };

std::string emit_result(const QueryResult& result, OutputFormat format);

struct ResultDocument {
    std::vector<MemberBlock> members;
    Vector mean;
    Matrix cov;
    std::vector<ExternalLink> links;
    std::map<std::string, std::size_t> diagnostics;
};

ResultDocument parse_result_document(std::string_view text);

// Shared by the tree and result renderers.
std::string format_real(double v);

}  // namespace lgspi
