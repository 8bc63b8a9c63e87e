/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dlcm/models/checkpoint.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "dlcm/error.h"

namespace dlcm::models {
namespace {

constexpr std::size_t kValuesPerLine = 8;

template <typename T>
std::string Shortest(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string JoinWidths(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out.empty() ? "-" : out;
}

template <typename T>
void WriteValues(std::ostream& out, const std::vector<T>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << Shortest(values[i]) << ((i + 1) % kValuesPerLine == 0 ||
                                           i + 1 == values.size()
                                       ? '\n'
                                       : ' ');
  }
}

// Whitespace tokenizer that remembers the line of the last token read.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool Next(std::string& tok) {
    while (!(line_stream_ >> tok)) {
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      line_stream_.clear();
      line_stream_.str(line);
    }
    return true;
  }

  std::string Expect(const char* what) {
    std::string tok;
    if (!Next(tok)) Fail(std::string("unexpected end of file, wanted ") + what);
    return tok;
  }

  std::size_t ExpectSize(const char* what) {
    const std::string tok = Expect(what);
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      Fail(std::string("bad ") + what + " '" + tok + "'");
    }
    return v;
  }

  template <typename T>
  T ExpectNumber() {
    const std::string tok = Expect("value");
    T v{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      Fail("bad value '" + tok + "'");
    }
    return v;
  }

  // Rest of the current line, leading blanks dropped.
  std::string RestOfLine() {
    std::string rest;
    std::getline(line_stream_ >> std::ws, rest);
    line_stream_.clear();
    line_stream_.str("");
    return rest;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError("checkpoint: " + what, line_no_);
  }

 private:
  std::istream& in_;
  std::istringstream line_stream_;
  std::size_t line_no_ = 0;
};

std::vector<std::size_t> ParseWidths(TokenReader& r, const std::string& s) {
  std::vector<std::size_t> out;
  if (s == "-") return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    std::size_t v = 0;
    const auto res = std::from_chars(s.data() + start, s.data() + comma, v);
    if (res.ec != std::errc() || res.ptr != s.data() + comma) {
      r.Fail("bad hidden widths '" + s + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

void CheckAgainstSpec(const Checkpoint& c) {
  const ParamSet<float> expected = InitParams(c.spec, 0);
  if (expected.size() != c.params.size()) {
    throw ConfigError("checkpoint holds " + std::to_string(c.params.size()) +
                      " parameters, model " + ModelKindName(c.spec.kind) +
                      " needs " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& want = expected[i];
    const auto& got = c.params[i];
    if (want.name != got.name || want.value.shape != got.value.shape) {
      throw ConfigError("checkpoint parameter " + got.name + " " +
                        grad::ShapeString(got.value.shape) + " does not match " +
                        want.name + " " + grad::ShapeString(want.value.shape));
    }
  }
  if (c.initial_ranker &&
      c.initial_ranker->weights.size() != c.spec.num_features) {
    throw ConfigError("checkpoint linear ranker has " +
                      std::to_string(c.initial_ranker->weights.size()) +
                      " weights for " + std::to_string(c.spec.num_features) +
                      " features");
  }
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const Checkpoint& c) {
  out << "dlcm-checkpoint " << kCheckpointVersion << '\n';
  out << "model " << ModelKindName(c.spec.kind) << '\n';
  out << "features " << c.spec.num_features << '\n';
  out << "list_size " << c.spec.list_size << '\n';
  out << "beta " << c.spec.beta << '\n';
  out << "k " << c.spec.k << '\n';
  out << "hidden " << JoinWidths(c.spec.hidden) << '\n';
  for (const auto& [key, value] : c.metadata) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos ||
        value.find('\n') != std::string::npos) {
      throw ContractError("checkpoint metadata key/value not writable: " + key);
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  for (const auto& p : c.params) {
    out << "param " << p.name << ' ' << p.value.rank();
    for (std::size_t e : p.value.shape) out << ' ' << e;
    out << '\n';
    WriteValues(out, p.value.data);
  }
  if (c.initial_ranker) {
    out << "linear " << c.initial_ranker->weights.size() << '\n';
    WriteValues(out, c.initial_ranker->weights);
  }
  out << "end\n";
  if (!out) throw IoError("checkpoint: write failed");
}

Checkpoint ReadCheckpoint(std::istream& in) {
  TokenReader r(in);
  if (r.Expect("header") != "dlcm-checkpoint") r.Fail("not a checkpoint");
  const std::size_t version = r.ExpectSize("version");
  if (version != static_cast<std::size_t>(kCheckpointVersion)) {
    r.Fail("unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  bool saw_model = false, saw_end = false;
  std::string key;
  while (r.Next(key)) {
    if (key == "end") {
      saw_end = true;
      break;
    } else if (key == "model") {
      try {
        c.spec.kind = ParseModelKind(r.Expect("model kind"));
      } catch (const ConfigError& e) {
        r.Fail(e.what());
      }
      saw_model = true;
    } else if (key == "features") {
      c.spec.num_features = r.ExpectSize("features");
    } else if (key == "list_size") {
      c.spec.list_size = r.ExpectSize("list_size");
    } else if (key == "beta") {
      c.spec.beta = r.ExpectSize("beta");
    } else if (key == "k") {
      c.spec.k = r.ExpectSize("k");
    } else if (key == "hidden") {
      c.spec.hidden = ParseWidths(r, r.Expect("hidden widths"));
    } else if (key == "meta") {
      const std::string name = r.Expect("metadata key");
      c.metadata[name] = r.RestOfLine();
    } else if (key == "param") {
      const std::string name = r.Expect("parameter name");
      const std::size_t rank = r.ExpectSize("rank");
      if (rank == 0 || rank > 4) r.Fail("bad rank for " + name);
      grad::Shape shape;
      for (std::size_t i = 0; i < rank; ++i) {
        shape.push_back(r.ExpectSize("extent"));
        if (shape.back() == 0) r.Fail("zero extent in " + name);
      }
      std::vector<float> values(grad::NumElements(shape));
      for (float& v : values) v = r.ExpectNumber<float>();
      c.params.Add(name, grad::Array<float>(shape, std::move(values)));
    } else if (key == "linear") {
      LinearRanker lr;
      lr.weights.resize(r.ExpectSize("weight count"));
      for (double& w : lr.weights) w = r.ExpectNumber<double>();
      c.initial_ranker = std::move(lr);
    } else {
      r.Fail("unknown record '" + key + "'");
    }
  }
  if (!saw_model) r.Fail("missing model record");
  if (!saw_end) r.Fail("truncated (no end record)");
  c.spec.Validate();
  CheckAgainstSpec(c);
  return c;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path);
  WriteCheckpoint(out, ckpt);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path);
  return ReadCheckpoint(in);
}

}  // namespace dlcm::models
