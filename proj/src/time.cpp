//------------------------------------------------------------------------------
//
//   Copyright 2026 The fever-sim Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "fever/time.hpp"

#include <stdexcept>

namespace fever {

namespace {

TimeInt parse_int(std::string_view digits, std::string_view whole)
{
  if (digits.empty())
  {
    throw std::invalid_argument("malformed time value: '" + std::string(whole) + "'");
  }
  TimeInt value = 0;
  for (char ch : digits)
  {
    if (ch < '0' || ch > '9')
    {
      throw std::invalid_argument("malformed time value: '" + std::string(whole) + "'");
    }
    value = value * 10 + (ch - '0');
  }
  return value;
}

}  // namespace

Time make_time(std::int64_t num, std::int64_t den)
{
  return Time(TimeInt(num), TimeInt(den));
}

Time parse_time(std::string_view text)
{
  std::string_view const whole = text;
  bool negative                = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+'))
  {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Time result;
  if (auto slash = text.find('/'); slash != std::string_view::npos)
  {
    TimeInt const num = parse_int(text.substr(0, slash), whole);
    TimeInt const den = parse_int(text.substr(slash + 1), whole);
    if (den == 0)
    {
      throw std::invalid_argument("zero denominator in time value: '" + std::string(whole) + "'");
    }
    result = Time(num, den);
  }
  else if (auto dot = text.find('.'); dot != std::string_view::npos)
  {
    std::string_view const int_part  = text.substr(0, dot);
    std::string_view const frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
    {
      throw std::invalid_argument("malformed time value: '" + std::string(whole) + "'");
    }
    TimeInt const ip = int_part.empty() ? TimeInt(0) : parse_int(int_part, whole);
    TimeInt const fp = frac_part.empty() ? TimeInt(0) : parse_int(frac_part, whole);
    TimeInt scale    = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i)
    {
      scale *= 10;
    }
    result = Time(ip * scale + fp, scale);
  }
  else
  {
    result = Time(parse_int(text, whole));
  }
  return negative ? -result : result;
}

std::string to_string(Time const &t)
{
  if (t.denominator() == 1)
  {
    return t.numerator().str();
  }
  return t.numerator().str() + "/" + t.denominator().str();
}

double to_double(Time const &t)
{
  return t.numerator().convert_to<double>() / t.denominator().convert_to<double>();
}

TimeInt floor_int(Time const &t)
{
  // boost::rational keeps the denominator positive.
  TimeInt q = t.numerator() / t.denominator();
  if (t.numerator() % t.denominator() != 0 && t.numerator() < 0)
  {
    q -= 1;
  }
  return q;
}

TimeInt ceil_int(Time const &t)
{
  TimeInt q = t.numerator() / t.denominator();
  if (t.numerator() % t.denominator() != 0 && t.numerator() > 0)
  {
    q += 1;
  }
  return q;
}

bool is_integer(Time const &t)
{
  return t.denominator() == 1;
}

}  // namespace fever
