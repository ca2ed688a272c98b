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

#pragma once

#include "risdoa/anm.hpp"
#include "risdoa/ris_model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace risdoa {

// Shortest round-trip decimal rendering; "inf", "-inf" and "nan" for non-finite.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws std::runtime_error when the column is missing.
  int column(const std::string& name) const;
};

// Plain comma-separated values without quoting; every row must match the header width.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// sample_index,real,imag
void write_snapshot_csv(const std::filesystem::path& path, const CVector& samples);
CVector read_snapshot_csv(const std::filesystem::path& path);

// epoch,mean_loss with epochs numbered from first_epoch.
void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& history,
                    long first_epoch = 1);

struct EstimateRow {
  int trial = 0;
  int k = 0;
  Direction direction;
  double residual = 0.0;
};

// trial,k,theta_deg,phi_deg,residual
void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows);

// iteration,primal_residual,dual_residual,rho,objective
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

double parse_number(const std::string& text);

}  // namespace risdoa
