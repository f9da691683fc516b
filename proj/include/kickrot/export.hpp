// Copyright 2026 The kickrot Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file export.hpp
 * @brief Tab-separated tables with a fixed number format.
 *
 * Each file starts with one header line naming the columns and their units.
 * Reals are written with 17 significant digits, integers as integers. Rows
 * are sorted by the leading key columns before writing.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kickrot {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Shortest-form decimal with 17 significant digits.
[[nodiscard]] std::string format_real(double v);
[[nodiscard]] std::string format_cell(const Cell& c);

struct Table {
  std::vector<std::string> columns;  ///< e.g. "P", "omega[rad]", "class".
  std::size_t key_columns = 1;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  /// Stable sort by the key columns, ascending.
  void sort();
  [[nodiscard]] std::string str() const;
};

/// Sorts and writes `table`; throws std::runtime_error on I/O failure.
void write_table(const std::filesystem::path& path, Table table);

/// Writes text verbatim; throws std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kickrot
