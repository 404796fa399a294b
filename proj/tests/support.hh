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

#ifndef CHR_TESTS_SUPPORT_HH_
#define CHR_TESTS_SUPPORT_HH_

#include <chr/syntax.hh>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef CGCHR_CORPUS
#define CGCHR_CORPUS "corpus"
#endif

namespace chr::test
{
	inline std::string slurp(const std::filesystem::path& path)
	{
		std::ifstream in(path);
		std::ostringstream os;
		os << in.rdbuf();
		return os.str();
	}

	struct Case
	{
		std::string name;
		std::string text;
		Program program;
		std::vector< Constraint > goals;
	};

	inline Case load_case(const std::string& name)
	{
		std::filesystem::path dir(CGCHR_CORPUS);
		Case c;
		c.name = name;
		c.text = slurp(dir / (name + ".chr"));
		c.program = parse_program(c.text);
		c.goals = parse_goals(slurp(dir / (name + ".goals")));
		return c;
	}

	inline std::vector< std::string > corpus_names()
	{
		std::vector< std::string > names;
		for (const auto& e : std::filesystem::directory_iterator(CGCHR_CORPUS))
			if (e.path().extension() == ".chr")
				names.push_back(e.path().stem().string());
		std::sort(names.begin(), names.end());
		return names;
	}

	inline std::vector< Case > corpus()
	{
		std::vector< Case > cs;
		for (const auto& n : corpus_names())
			cs.push_back(load_case(n));
		return cs;
	}

	/**
	 * Random terminating programs over A/1, B/1, C/1 and ground integer goals.
	 *
	 * Every body constraint is `v-1` for a head variable v with guard v>0,
	 * taken from a distinct removed head (or the single head of a
	 * propagation rule). Each new constraint is strictly below the one it
	 * came from, so derivations are finite.
	 */
	struct FuzzCase
	{
		std::string program;
		std::string goals;
	};

	inline FuzzCase fuzz_case(std::mt19937& rng)
	{
		auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution< int >(lo, hi)(rng); };
		const char* preds[] = {"A", "B", "C"};
		const char* vars[] = {"x", "y", "z"};
		const char* cmps[] = {"<", "<=", "==", "!=", ">"};

		std::ostringstream prog;
		int rules = pick(1, 4);
		for (int r = 0; r < rules; ++r)
		{
			bool propagation = pick(0, 4) == 0;
			int heads = propagation ? 1 : pick(1, 3);
			int kept = propagation ? 1 : pick(0, heads - 1);
			std::vector< std::string > hs;
			std::vector< int > head_var(heads, -1);
			for (int h = 0; h < heads; ++h)
			{
				std::string arg;
				int roll = pick(0, 5);
				if (roll == 0)
					arg = std::to_string(pick(0, 2));
				else
				{
					// Occasionally share a variable to force a join.
					head_var[h] = roll == 1 && h > 0 ? head_var[h - 1] : h;
					if (head_var[h] < 0) head_var[h] = h;
					arg = vars[head_var[h]];
				}
				hs.push_back(std::string(preds[pick(0, 2)]) + "(" + arg + ")");
			}

			std::vector< std::string > guard;
			std::vector< int > distinct;
			for (int v : head_var)
				if (v >= 0 && std::find(distinct.begin(), distinct.end(), v) == distinct.end())
					distinct.push_back(v);
			if (distinct.size() >= 2 && pick(0, 1))
				guard.push_back(std::string(vars[distinct[0]]) + cmps[pick(0, 4)] + vars[distinct[1]]);

			// Body variables come from removed heads, one per head.
			std::vector< std::string > body;
			std::vector< int > used;
			int sources_lo = propagation ? 0 : kept;
			int budget = propagation ? 1 : heads - kept;
			for (int h = sources_lo; h < heads && static_cast< int >(body.size()) < budget; ++h)
			{
				int v = head_var[h];
				if (v < 0 || std::find(used.begin(), used.end(), v) != used.end() || pick(0, 2) == 0) continue;
				used.push_back(v);
				guard.push_back(std::string(vars[v]) + ">0");
				body.push_back(std::string(preds[pick(0, 2)]) + "(" + vars[v] + "-1)");
			}

			prog << "r" << r << " @ ";
			auto join = [](const std::vector< std::string >& xs, const char* sep, std::size_t from, std::size_t to) {
				std::string s;
				for (std::size_t i = from; i < to; ++i)
					s += (i > from ? sep : "") + xs[i];
				return s;
			};
			if (propagation)
				prog << join(hs, ", ", 0, hs.size()) << " ==> ";
			else if (kept > 0)
				prog << join(hs, ", ", 0, kept) << " \\ " << join(hs, ", ", kept, hs.size()) << " <=> ";
			else
				prog << join(hs, ", ", 0, hs.size()) << " <=> ";
			if (!guard.empty())
				prog << join(guard, " && ", 0, guard.size()) << " | ";
			prog << (body.empty() ? std::string("true") : join(body, ", ", 0, body.size())) << ".\n";
		}

		std::ostringstream goals;
		int n = pick(0, 8);
		for (int i = 0; i < n; ++i)
			goals << (i ? ", " : "") << preds[pick(0, 2)] << "(" << pick(0, 3) << ")";
		return FuzzCase{prog.str(), goals.str()};
	}
}

#endif /* CHR_TESTS_SUPPORT_HH_ */
