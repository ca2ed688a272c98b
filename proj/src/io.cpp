// SPDX-License-Identifier: Apache-2.0
//
// risdoa: gridless 2D direction finding with an impaired 1-bit RIS
// Copyright (C) 2026 The risdoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "risdoa/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risdoa {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf" || text == "+inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::runtime_error("not a number: '" + text + "'");
  return v;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  throw std::runtime_error("CSV column '" + name + "' not found");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(table.header.size()) + " fields");
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  auto out = open_out(path);
  auto put = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  put(table.header);
  for (const auto& r : table.rows) put(r);
}

void write_snapshot_csv(const std::filesystem::path& path, const CVector& samples) {
  auto out = open_out(path);
  out << "sample_index,real,imag\n";
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    out << i << "," << format_number(samples(i).real()) << ","
        << format_number(samples(i).imag()) << "\n";
}

CVector read_snapshot_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int ci = t.column("sample_index");
  const int cr = t.column("real");
  const int cm = t.column("imag");
  CVector z(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto idx = static_cast<std::size_t>(parse_number(t.rows[r][ci]));
    if (idx != r) throw std::runtime_error("snapshot CSV sample_index out of order");
    z(static_cast<Eigen::Index>(r)) = cd(parse_number(t.rows[r][cr]), parse_number(t.rows[r][cm]));
  }
  return z;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& history,
                    long first_epoch) {
  auto out = open_out(path);
  out << "epoch,mean_loss\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    out << first_epoch + static_cast<long>(i) << "," << format_number(history[i]) << "\n";
}

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows) {
  auto out = open_out(path);
  out << "trial,k,theta_deg,phi_deg,residual\n";
  for (const auto& r : rows)
    out << r.trial << "," << r.k << "," << format_number(r.direction.elevation_deg) << ","
        << format_number(r.direction.azimuth_deg) << "," << format_number(r.residual) << "\n";
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  auto out = open_out(path);
  out << "iteration,primal_residual,dual_residual,rho,objective\n";
  for (const auto& t : trace)
    out << t.iteration << "," << format_number(t.primal_residual) << ","
        << format_number(t.dual_residual) << "," << format_number(t.rho) << ","
        << format_number(t.objective) << "\n";
}

}  // namespace risdoa
