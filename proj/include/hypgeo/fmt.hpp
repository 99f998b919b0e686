#pragma once
#include <string>
#include <vector>

namespace hypgeo {

// All numbers in reports are printed as %.16e: 17 significant digits,
// fixed shape, locale-independent, so identical runs emit identical bytes.
std::string num(double x);
std::string num(long long x);
std::string num(int x);

// Minimal deterministic JSON emitter. Object keys keep insertion order and
// doubles go through num(); that is the whole point of not using a library
// here -- emitted reports must be byte-stable and carry full precision.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(long long v);
  JsonWriter& value(int v);
  JsonWriter& value(unsigned long long v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value_raw(const std::string& v);  // pre-rendered token
  std::string str() const { return out_; }

 private:
  void pre_value();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

std::string json_escape(const std::string& s);

}  // namespace hypgeo
