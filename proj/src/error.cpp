// Copyright 2026 The gepsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gepsim/error.hpp"

namespace gepsim {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::SingularB: return "SingularB";
    case Errc::IllConditionedEigenbasis: return "IllConditionedEigenbasis";
    case Errc::BadSpectrumLength: return "BadSpectrumLength";
    case Errc::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::EvenP: return "EvenP";
    case Errc::ParameterCap: return "ParameterCap";
    case Errc::TooLarge: return "TooLarge";
    case Errc::AlphaTooSmall: return "AlphaTooSmall";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::EmptyTerms: return "EmptyTerms";
    case Errc::NotSymmetricPair: return "NotSymmetricPair";
    case Errc::PerturbationTooLarge: return "PerturbationTooLarge";
  }
  return "Unknown";
}

}  // namespace gepsim
