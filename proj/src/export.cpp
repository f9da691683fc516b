// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

#include "kickrot/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace kickrot {

std::string format_real(double v) {
  if (v == 0.0) return "0";  // folds -0 into 0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return {buf.data(), ptr};
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  return std::get<std::string>(c);
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("Table::add: wrong number of cells");
  rows.push_back(std::move(row));
}

void Table::sort() {
  const std::size_t keys = std::min(key_columns, columns.size());
  std::stable_sort(rows.begin(), rows.end(), [keys](const auto& a, const auto& b) {
    for (std::size_t k = 0; k < keys; ++k) {
      if (a[k] < b[k]) return true;
      if (b[k] < a[k]) return false;
    }
    return false;
  });
}

std::string Table::str() const {
  std::string out;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (k) out += '\t';
    out += columns[k];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += '\t';
      out += format_cell(row[k]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_table(const std::filesystem::path& path, Table table) {
  table.sort();
  write_text(path, table.str());
}

}  // namespace kickrot
