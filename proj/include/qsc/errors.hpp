// Copyright 2026 The QSC Authors
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

#ifndef QSC_ERRORS_HPP
#define QSC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qsc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

#define QSC_DEFINE_ERROR(Name)            \
    class Name : public Error {           \
       public:                            \
        using Error::Error;               \
    };

QSC_DEFINE_ERROR(NonHermitianInput)
QSC_DEFINE_ERROR(DimensionMismatch)
QSC_DEFINE_ERROR(DimensionTooLarge)
QSC_DEFINE_ERROR(PoleTooClose)
QSC_DEFINE_ERROR(SingularResolvent)
QSC_DEFINE_ERROR(NoSignChange)
QSC_DEFINE_ERROR(CouplingTooLarge)
QSC_DEFINE_ERROR(HypothesisUnmet)
QSC_DEFINE_ERROR(ParseError)
QSC_DEFINE_ERROR(ConfigError)

#undef QSC_DEFINE_ERROR

}  // namespace qsc

#endif
