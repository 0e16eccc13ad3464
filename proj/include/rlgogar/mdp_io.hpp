#pragma once

#include <string>
#include <string_view>

#include "rlgogar/mdp.hpp"

namespace rlgogar {

// Line-oriented MDP text format:
//   states N
//   actions M
//   gamma G
//   terminal s ...
//   start s p [s p ...]
//   t s a s' p
//   r s a s' val
// Unlisted transitions are probability 0 and unlisted rewards are 0. Terminal
// states carry no t/r lines; the loader fills in their self-loops. '#' starts
// a comment. The writer emits the canonical form: fixed key order, sorted
// indices, %.17g numbers, so write(load(f)) == f for canonical files.
Mdp parse_mdp(std::string_view text, const std::string& name = "mdp");
std::string write_mdp(const Mdp& mdp);

// File wrappers; load_mdp names the Mdp after the file stem and validates it.
Mdp load_mdp(const std::string& path);
void save_mdp(const Mdp& mdp, const std::string& path);

// Shared low-level helpers for the other text formats.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string format_g17(double v);

}  // namespace rlgogar
