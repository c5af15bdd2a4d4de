// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>

#include "ptxlat/error.hpp"
#include "ptxlat/isa_model.hpp"
#include "strings.hpp"

namespace ptxlat {

namespace {

constexpr std::string_view kMultiple = "multiple";

bool is_sass_opcode(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_';
  });
}

}  // namespace

std::uint32_t SassMapping::total_multiplicity() const noexcept {
  std::uint32_t total = 0;
  for (const auto& term : expansion) total += term.multiplicity;
  return total;
}

std::string format_expansion(const SassExpansion& expansion) {
  std::string out;
  for (std::size_t i = 0; i < expansion.size(); ++i) {
    if (i) out += '+';
    if (expansion[i].multiplicity != 1) out += fmt::format("{}*", expansion[i].multiplicity);
    out += expansion[i].opcode;
  }
  return out;
}

SassExpansion parse_expansion(std::string_view text) {
  SassExpansion out;
  if (detail::trim(text).empty()) return out;
  for (auto piece : detail::split(text, '+')) {
    piece = detail::trim(piece);
    SassTerm term;
    if (auto star = piece.find('*'); star != std::string_view::npos) {
      auto count = detail::parse_int<std::uint32_t>(detail::trim(piece.substr(0, star)));
      if (!count || *count == 0) {
        throw ParseError(fmt::format("invalid multiplicity in SASS term '{}'", piece), std::string(piece));
      }
      term.multiplicity = *count;
      piece = detail::trim(piece.substr(star + 1));
    }
    if (!is_sass_opcode(piece)) {
      throw ParseError(fmt::format("invalid SASS opcode '{}'", piece), std::string(piece));
    }
    term.opcode = detail::to_upper(piece);
    out.push_back(std::move(term));
  }
  return out;
}

std::string SassMapping::notation() const {
  if (multi_instruction) {
    if (hints.empty()) return std::string(kMultiple);
    return fmt::format("{}({})", kMultiple, detail::join(hints, "+"));
  }
  std::string out = format_expansion(expansion);
  for (const auto& alt : alternatives) {
    out += " | ";
    out += format_expansion(alt);
  }
  return out;
}

SassMapping parse_sass_mapping(std::string ptx_signature, std::string_view notation) {
  SassMapping mapping;
  mapping.ptx_signature = std::move(ptx_signature);
  notation = detail::trim(notation);

  if (notation.starts_with(kMultiple)) {
    mapping.multi_instruction = true;
    std::string_view rest = detail::trim(notation.substr(kMultiple.size()));
    if (rest.empty()) return mapping;
    if (rest.front() != '(' || rest.back() != ')') {
      throw ParseError(fmt::format("expected '(hint+hint)' after 'multiple' in '{}'", notation),
                       std::string(rest));
    }
    for (const auto& term : parse_expansion(rest.substr(1, rest.size() - 2))) {
      mapping.hints.push_back(term.opcode);
    }
    return mapping;
  }

  auto options = detail::split(notation, '|');
  mapping.expansion = parse_expansion(options.front());
  if (mapping.expansion.empty()) {
    throw ParseError(fmt::format("empty SASS expansion for '{}'", mapping.ptx_signature));
  }
  for (std::size_t i = 1; i < options.size(); ++i) {
    auto alt = parse_expansion(options[i]);
    if (alt.empty()) throw ParseError("empty alternative SASS expansion", std::string(options[i]));
    mapping.alternatives.push_back(std::move(alt));
  }
  return mapping;
}

}  // namespace ptxlat
