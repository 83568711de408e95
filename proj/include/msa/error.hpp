// SPDX-License-Identifier: Apache-2.0
//
// msa-sim: baseband simulator for metasurface superheterodyne backscatter links
// Copyright (C) 2026 The msa-sim Authors
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

#include <stdexcept>
#include <string>

namespace msa
{

// Base of every error the library throws. Callers that only need to know
// "the request was bad" can catch this; the CLI maps it to exit code 2.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Out-of-domain argument to a single operation (bad beta, empty taps, ...).
class ParameterError : public Error
{
public:
    using Error::Error;
};

// A configuration object violates one of its invariants.
class ConfigError : public Error
{
public:
    using Error::Error;
};

// Bit or symbol counts that do not fit the framing.
class FramingError : public Error
{
public:
    using Error::Error;
};

// Frame synchronisation could not find a trustworthy correlation peak.
class SyncError : public Error
{
public:
    using Error::Error;
};

// Problem size beyond what an exact algorithm can enumerate.
class CapacityError : public Error
{
public:
    using Error::Error;
};

// Malformed or unreadable external file.
class FormatError : public Error
{
public:
    using Error::Error;
};

} // namespace msa
