/*
 *  This program is free software; you can redistribute it and/or
 *  modify it under the terms of the Apache License, Version 2.0.
 *
 *  Copyright:
 *     2026, The cgchr authors
 *
 *     Licensed under the Apache License, Version 2.0 (the "License");
 *     you may not use this file except in compliance with the License.
 *     You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *     Unless required by applicable law or agreed to in writing, software
 *     distributed under the License is distributed on an "AS IS" BASIS,
 *     WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *     See the License for the specific language governing permissions and
 *     limitations under the License.
 *
 */

#include <chr/trace.hh>

#include <charconv>
#include <sstream>

namespace chr
{
	const char* to_string(StepKind k)
	{
		switch (k)
		{
			case StepKind::Solve: return "Solve";
			case StepKind::Activate: return "Activate";
			case StepKind::Simplify: return "Simplify";
			case StepKind::Propagate: return "Propagate";
			case StepKind::Drop: return "Drop";
		}
		return "?";
	}

	const char* to_string(Status s)
	{
		switch (s)
		{
			case Status::Done: return "done";
			case Status::Failed: return "failed";
			case Status::StepLimit: return "step-limit";
		}
		return "?";
	}

	TraceFormatError::TraceFormatError(const std::string& msg, std::size_t line)
		: std::runtime_error("trace line " + std::to_string(line) + ": " + msg), _line(line)
	{ }

	namespace
	{
		std::string ids(const std::vector< Id >& v, char open, char close)
		{
			std::string s(1, open);
			for (std::size_t i = 0; i < v.size(); ++i)
			{
				if (i) s += ',';
				s += std::to_string(v[i]);
			}
			s += close;
			return s;
		}
	}

	std::string to_string(const TraceStep& step)
	{
		std::string s = std::to_string(step.seq) + " " + to_string(step.kind);
		if (step.is_firing())
			s += " " + step.rule;
		if (step.kind == StepKind::Activate || step.kind == StepKind::Solve)
			s += " " + (step.goal ? to_string(*step.goal) : std::string("?"));
		else
			s += " #" + std::to_string(step.id);
		s += " " + ids(step.propagated, '{', '}') + "\\" + ids(step.simplified, '{', '}');
		if (step.kind == StepKind::Activate)
			s += " id=" + std::to_string(step.id);
		if (step.is_firing())
			s += " heads=" + ids(step.heads, '[', ']') + " phi=" + to_string(step.phi);
		if (step.worker >= 0)
			s += " worker=" + std::to_string(step.worker) + " interval=[" + std::to_string(step.start) + "," + std::to_string(step.commit) + "]";
		return s;
	}

	std::string serialize(const Trace& t)
	{
		std::string out = "# trace engine=" + t.engine + " workers=" + std::to_string(t.workers) + " seed=" + std::to_string(t.seed) + "\n";
		for (const auto& step : t.steps)
			out += to_string(step) + "\n";
		if (t.status)
			out += std::string("# status=") + to_string(*t.status) + "\n";
		std::istringstream dump(t.final_store);
		for (std::string line; std::getline(dump, line);)
			out += "# final " + line + "\n";
		return out;
	}

	namespace
	{
		struct LineParser
		{
			std::size_t line;

			[[noreturn]] void fail(const std::string& msg) const { throw TraceFormatError(msg, line); }

			std::uint64_t number(std::string_view s) const
			{
				std::uint64_t v = 0;
				auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
				if (ec != std::errc() || p != s.data() + s.size())
					fail("expected a number, got '" + std::string(s) + "'");
				return v;
			}

			std::vector< Id > id_list(std::string_view s, char open, char close) const
			{
				if (s.size() < 2 || s.front() != open || s.back() != close)
					fail("malformed id list '" + std::string(s) + "'");
				s = s.substr(1, s.size() - 2);
				std::vector< Id > out;
				while (!s.empty())
				{
					auto comma = s.find(',');
					out.push_back(number(s.substr(0, comma)));
					if (comma == std::string_view::npos) break;
					s.remove_prefix(comma + 1);
				}
				return out;
			}

			Substitution phi(std::string_view s, std::uint32_t scope) const
			{
				if (s.size() < 2 || s.front() != '{' || s.back() != '}')
					fail("malformed substitution '" + std::string(s) + "'");
				s = s.substr(1, s.size() - 2);
				Substitution out;
				while (!s.empty())
				{
					auto comma = s.find(',');
					std::string_view item = s.substr(0, comma);
					auto eq = item.find('=');
					if (eq == std::string_view::npos || eq == 0)
						fail("malformed binding '" + std::string(item) + "'");
					try
					{
						out.bind(Var{std::string(item.substr(0, eq)), scope}, parse_term(item.substr(eq + 1), 0));
					}
					catch (const ParseError& e)
					{
						fail(std::string("bad term in binding: ") + e.what());
					}
					if (comma == std::string_view::npos) break;
					s.remove_prefix(comma + 1);
				}
				return out;
			}
		};

		std::vector< std::string_view > words(std::string_view s)
		{
			std::vector< std::string_view > out;
			std::size_t i = 0;
			while (i < s.size())
			{
				while (i < s.size() && s[i] == ' ') ++i;
				std::size_t j = i;
				while (j < s.size() && s[j] != ' ') ++j;
				if (j > i) out.push_back(s.substr(i, j - i));
				i = j;
			}
			return out;
		}

		StepKind kind_of(std::string_view s, const LineParser& lp)
		{
			for (StepKind k : {StepKind::Solve, StepKind::Activate, StepKind::Simplify, StepKind::Propagate, StepKind::Drop})
				if (s == to_string(k)) return k;
			lp.fail("unknown step kind '" + std::string(s) + "'");
		}
	}

	Trace parse_trace(std::string_view text, const Program& p)
	{
		Trace t;
		std::size_t lineno = 0;
		while (!text.empty())
		{
			auto nl = text.find('\n');
			std::string_view line = text.substr(0, nl);
			text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
			++lineno;
			if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
			if (line.empty()) continue;
			LineParser lp{lineno};

			if (line.front() == '#')
			{
				if (line.starts_with("# final "))
				{
					t.final_store += std::string(line.substr(8)) + "\n";
					continue;
				}
				if (line.starts_with("# status="))
				{
					auto v = line.substr(9);
					for (Status s : {Status::Done, Status::Failed, Status::StepLimit})
						if (v == to_string(s)) t.status = s;
					if (!t.status) lp.fail("unknown status");
					continue;
				}
				if (line.starts_with("# trace"))
				{
					for (auto w : words(line.substr(7)))
					{
						if (w.starts_with("engine=")) t.engine = std::string(w.substr(7));
						else if (w.starts_with("workers=")) t.workers = static_cast< unsigned >(lp.number(w.substr(8)));
						else if (w.starts_with("seed=")) t.seed = lp.number(w.substr(5));
					}
				}
				continue;
			}

			auto w = words(line);
			if (w.size() < 4) lp.fail("too few fields");
			TraceStep step;
			step.seq = lp.number(w[0]);
			step.kind = kind_of(w[1], lp);
			std::size_t k = 2;
			std::uint32_t scope = 0;
			if (step.is_firing())
			{
				step.rule = std::string(w[k++]);
				std::size_t ri = p.rule_index(step.rule);
				if (ri == p.rules.size()) lp.fail("unknown rule '" + step.rule + "'");
				scope = p.rules[ri].scope;
			}
			if (k >= w.size()) lp.fail("missing goal");
			if (step.kind == StepKind::Activate || step.kind == StepKind::Solve)
			{
				try
				{
					step.goal = parse_constraint(w[k++], 0);
				}
				catch (const ParseError& e)
				{
					lp.fail(std::string("bad goal: ") + e.what());
				}
			}
			else
			{
				if (!w[k].starts_with('#')) lp.fail("expected #id goal");
				step.id = lp.number(w[k++].substr(1));
			}
			if (k >= w.size()) lp.fail("missing side effect");
			auto delta = w[k++];
			auto bs = delta.find("}\\{");
			if (bs == std::string_view::npos) lp.fail("malformed side effect");
			step.propagated = lp.id_list(delta.substr(0, bs + 1), '{', '}');
			step.simplified = lp.id_list(delta.substr(bs + 2), '{', '}');

			for (; k < w.size(); ++k)
			{
				auto f = w[k];
				if (f.starts_with("id=")) step.id = lp.number(f.substr(3));
				else if (f.starts_with("heads=")) step.heads = lp.id_list(f.substr(6), '[', ']');
				else if (f.starts_with("phi=")) step.phi = lp.phi(f.substr(4), scope);
				else if (f.starts_with("worker=")) step.worker = static_cast< int >(lp.number(f.substr(7)));
				else if (f.starts_with("interval="))
				{
					auto iv = lp.id_list(f.substr(9), '[', ']');
					if (iv.size() != 2) lp.fail("interval needs two ticks");
					step.start = iv[0];
					step.commit = iv[1];
				}
				else lp.fail("unknown field '" + std::string(f) + "'");
			}
			t.steps.push_back(std::move(step));
		}
		return t;
	}
}
