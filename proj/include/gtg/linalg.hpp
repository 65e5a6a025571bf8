/*
 * Copyright 2026 The GraphTreeGen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <vector>

#include "gtg/matrix.hpp"

namespace gtg {

// Dense LU with partial pivoting. Both throw SingularMatrix when a pivot falls
// below 1e-14 times the largest entry of the input.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);
Matrix inverse(const Matrix& a);

}  // namespace gtg
