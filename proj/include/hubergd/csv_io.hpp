#pragma once

#include <string>
#include <vector>

#include "hubergd/dataset.hpp"
#include "hubergd/trainer.hpp"
#include "hubergd/verify.hpp"

namespace hubergd {

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

/// Header x1,...,xD,label[,cluster]; 17 significant digits.
std::string dataset_to_csv(const Dataset& D);
Dataset dataset_from_csv(const std::string& text, const std::string& origin = "<dataset>");
void write_dataset_csv(const std::string& path, const Dataset& D);
Dataset read_dataset_csv(const std::string& path);

/// t,loss,grad_norm,param_norm,step_size,alignment,ratio,i1,i2,i3,lemma5
std::string telemetry_to_csv(const std::vector<IterationRecord>& records);

/// check,scope,passed,worst_value,threshold,witness
std::string verdicts_to_csv(const std::vector<VerdictRow>& rows);

struct SweepRow {
  double param_value = 0.0;
  double L1 = 0.0;
  double log_inv_L1 = 0.0;
  double final_loss = 0.0;
  double runtime_s = 0.0;
};

/// param_value,L1,log_inv_L1,final_loss,runtime_s
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace hubergd
