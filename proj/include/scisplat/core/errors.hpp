// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace scisplat {

/// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& what) : Error("shape mismatch: " + what) {}
};

struct InvalidRatio : Error {
  explicit InvalidRatio(const std::string& what) : Error("invalid ratio: " + what) {}
};

/// Rotation too close to the pi branch cut of the SE(3) logarithm.
struct AngleNearPi : Error {
  AngleNearPi() : Error("rotation angle too close to pi for se3_log") {}
};

struct BehindCamera : Error {
  BehindCamera() : Error("point is behind the camera near-clip plane") {}
};

/// A degraded-frame selection retained zero valid pixels (tau too aggressive).
struct EmptySelection : Error {
  explicit EmptySelection(const std::string& what) : Error("empty selection: " + what) {}
};

struct FileFormatError : Error {
  explicit FileFormatError(const std::string& what) : Error("file format: " + what) {}
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& what) : Error("invalid spec: " + what) {}
};

/// Backward pass received aux records from a different forward pass.
struct StaleAux : Error {
  StaleAux() : Error("aux records do not match the cloud revision being differentiated") {}
};

struct Diverged : Error {
  explicit Diverged(const std::string& what) : Error("training diverged: " + what) {}
};

struct InvalidStep : Error {
  explicit InvalidStep(const std::string& what) : Error("invalid step: " + what) {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error("length mismatch: " + what) {}
};

struct DegenerateGeometry : Error {
  explicit DegenerateGeometry(const std::string& what) : Error("degenerate geometry: " + what) {}
};

struct TooSmall : Error {
  explicit TooSmall(const std::string& what) : Error("input too small: " + what) {}
};

}  // namespace scisplat
