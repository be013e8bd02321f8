// Copyright 2026 The Cotrain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Log-domain helpers shared by the sampler and the estimators.

#ifndef COTRAIN_NUMERIC_H_
#define COTRAIN_NUMERIC_H_

#include <span>
#include <vector>

namespace cotrain {

// log(sum(exp(x))) with max subtraction. Returns -inf for an empty span.
double LogSumExp(std::span<const double> x);

// log(softmax(x)), elementwise.
std::vector<double> LogSoftmax(std::span<const double> x);

// softmax(x), elementwise.
std::vector<double> Softmax(std::span<const double> x);

double Sigmoid(double x);

// log(1 + exp(x)) without overflow.
double Softplus(double x);

}  // namespace cotrain

#endif  // COTRAIN_NUMERIC_H_
