#pragma once

#include <map>
#include <string>

#include "osiris/mdp.hpp"

namespace osiris {

// On-disk form of an MDP plus any number of named policies. The document is
// strict both ways: loading validates shapes and probability rows exactly
// like validate_mdp/validate_policy, rejects unknown fields, and reports
// problems with their JSON path. Numbers are written so that a save/load
// round trip reproduces every double bit-for-bit.
struct MdpDocument {
  MdpSpec mdp;
  std::map<std::string, PolicySpec> policies;
};

std::string mdp_to_json(const MdpDocument& doc);
MdpDocument mdp_from_json(const std::string& text);

void save_mdp_file(const MdpDocument& doc, const std::string& path);
MdpDocument load_mdp_file(const std::string& path);

}  // namespace osiris
