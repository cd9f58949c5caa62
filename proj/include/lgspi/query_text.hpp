#pragma once

// Text forms used on the command line and in bench query lists:
//
//   ids:       a1,c2
//   evidence:  a2=2.0;b1=0.5,1.5
//   query:     --target a1,c2 [--given c1] [--evidence a2=2.0;b1=0.5,1.5]

#include <string_view>

#include "lgspi/query_engine.hpp"

namespace lgspi {

IdSet parse_id_list(std::string_view text);
EvidenceMap parse_evidence(std::string_view text);
Query parse_query_line(std::string_view line);

}  // namespace lgspi
