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

#include "support.hh"

#include <chr/abstract.hh>
#include <chr/concurrent.hh>
#include <chr/goal_engine.hh>
#include <chr/pitfalls.hh>
#include <chr/verify.hh>

#include <chrono>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

using namespace chr;
using namespace chr::test;

namespace
{
	using Clock = std::chrono::steady_clock;

	double seconds_since(Clock::time_point t0)
	{
		return std::chrono::duration< double >(Clock::now() - t0).count();
	}

	/// A finished run kept for the trace checks (criteria 5 to 7).
	struct Recorded
	{
		std::string what;
		const Program* program;
		std::vector< Constraint > goals;
		RunResult result;
	};

	std::vector< Recorded > recorded;
	int failures = 0;

	void line(int n, bool ok, const std::string& text)
	{
		std::cout << (ok ? "PASS " : "FAIL ") << n << " " << text << std::endl;
		if (!ok) ++failures;
	}

	/// Multiset of the remaining CHR constraints, printed without ids.
	std::multiset< std::string > chr_part(const Store& s)
	{
		std::multiset< std::string > out;
		for (Id id : s.alive_ids())
			out.insert(to_string(s.get(id)));
		return out;
	}

	std::int64_t as_int(const Term& t)
	{
		return std::get< std::int64_t >(t.as_value());
	}

	// ---------------------------------------------------------------------

	void criterion1(const Program& p, const std::vector< Constraint >& goals)
	{
		// Expected answer: one Gcd holding the gcd of the inputs.
		std::int64_t g = 0;
		for (const auto& c : goals)
			g = std::gcd(g, as_int(std::get< Chr >(c).args[0]));
		std::multiset< std::string > expect{"Gcd(" + std::to_string(g) + ")"};

		auto t0 = Clock::now();
		int bad = 0;
		std::string first;
		auto check = [&](const std::string& what, RunResult r) {
			if (r.status != Status::Done || chr_part(r.store) != expect || !r.store.equations().empty())
			{
				if (!bad++) first = what + " gave " + r.store.dump();
			}
			recorded.push_back({what, &p, goals, std::move(r)});
		};
		for (int i = 0; i < 100; ++i)
			check("gcd sequential", run_sequential(p, goals));
		for (unsigned w : {1u, 2u, 4u, 8u})
			for (std::uint64_t seed = 0; seed < 100; ++seed)
				check("gcd workers=" + std::to_string(w) + " seed=" + std::to_string(seed),
					run_concurrent(p, goals, EngineConfig{w, seed, 0}));
		double secs = seconds_since(t0);
		line(1, bad == 0 && secs < 5.0, "gcd: 500 runs end in {Gcd(" + std::to_string(g) + ")}, " + std::to_string(bad)
			+ " wrong, " + std::to_string(secs) + " s" + (first.empty() ? "" : "; " + first));
	}

	void criterion2(const Program& p, const std::vector< Constraint >& goals)
	{
		// Expected answers: every way of pairing the Gets with the Puts.
		std::vector< std::string > gets;
		std::vector< std::string > puts;
		for (const auto& c : goals)
		{
			const auto& k = std::get< Chr >(c);
			(k.pred == "Get" ? gets : puts).push_back(to_string(k.args[0]));
		}
		std::set< std::string > expect;
		std::sort(puts.begin(), puts.end());
		do
		{
			std::vector< std::string > bind;
			for (std::size_t i = 0; i < gets.size(); ++i)
				bind.push_back(gets[i] + "=" + puts[i]);
			std::sort(bind.begin(), bind.end());
			std::string s = "{} {";
			for (std::size_t i = 0; i < bind.size(); ++i)
				s += (i ? "," : "") + bind[i];
			expect.insert(s + "}");
		}
		while (std::next_permutation(puts.begin(), puts.end()));

		auto oracle = final_stores(AbstractStore::from(goals), p);
		std::set< std::string > forms;
		for (const auto& f : oracle.forms())
			forms.insert(f);

		int outside = 0;
		std::set< std::string > seen;
		for (std::uint64_t seed = 0; seed < 200; ++seed)
		{
			auto r = run_concurrent(p, goals, EngineConfig{4, seed, 0});
			std::string c = canonical(r.store.drop_ids());
			seen.insert(c);
			if (r.status != Status::Done || !forms.count(c)) ++outside;
			recorded.push_back({"channel seed=" + std::to_string(seed), &p, goals, std::move(r)});
		}
		std::string observed;
		for (const auto& s : seen)
			observed += " " + s;
		line(2, forms == expect && outside == 0, "channel: oracle gives " + std::to_string(forms.size())
			+ " stores (expected " + std::to_string(expect.size()) + "), " + std::to_string(outside)
			+ " of 200 runs outside; observed" + observed);
	}

	/// One Merge(levels+1, min) and a Leq chain through the sorted inputs.
	std::string merge_chain_error(const Store& s, std::vector< std::int64_t > sorted)
	{
		std::sort(sorted.begin(), sorted.end());
		std::int64_t level = 1;
		while ((std::int64_t{1} << (level - 1)) < static_cast< std::int64_t >(sorted.size()))
			++level;
		std::vector< std::pair< std::int64_t, std::int64_t > > merges;
		std::map< std::int64_t, std::int64_t > next;
		for (Id id : s.alive_ids())
		{
			const Chr& c = s.get(id);
			if (c.pred == "Merge")
				merges.push_back({as_int(c.args[0]), as_int(c.args[1])});
			else if (c.pred == "Leq")
			{
				if (!next.emplace(as_int(c.args[0]), as_int(c.args[1])).second)
					return "two Leq constraints leave " + to_string(c.args[0]);
			}
			else
				return "unexpected " + to_string(c);
		}
		if (merges.size() != 1 || merges[0] != std::pair{level, sorted.front()})
			return "expected the single Merge(" + std::to_string(level) + "," + std::to_string(sorted.front()) + ")";
		if (next.size() + 1 != sorted.size())
			return "expected " + std::to_string(sorted.size() - 1) + " Leq constraints";
		for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
			if (next[sorted[i]] != sorted[i + 1])
				return "chain broken after " + std::to_string(sorted[i]);
		return {};
	}

	void criterion3(const Program& p, const std::vector< Constraint >& goals)
	{
		std::vector< std::int64_t > values;
		for (const auto& c : goals)
			values.push_back(as_int(std::get< Chr >(c).args[1]));

		auto t0 = Clock::now();
		int bad = 0;
		int runs = 0;
		std::string first;
		auto check = [&](const std::string& what, const Store& s, Status st) {
			++runs;
			std::string err = st == Status::Done ? merge_chain_error(s, values) : std::string("status ") + to_string(st);
			if (!err.empty() && !bad++) first = what + ": " + err;
		};
		for (std::uint64_t seed = 0; seed < 50; ++seed)
		{
			auto a = run_abstract(AbstractStore::from(goals), p, seed, 100000);
			Store s;
			bool final = is_final(a, p);
			for (const auto& c : a.constraints())
				if (const auto* k = std::get_if< Chr >(&c))
					s.insert(*k);
			check("abstract seed=" + std::to_string(seed), s, final ? Status::Done : Status::StepLimit);

			for (Policy pol : {Policy::Fifo, Policy::Lifo})
			{
				SequentialOptions o;
				o.policy = pol;
				auto r = run_sequential(p, goals, o);
				check(pol == Policy::Fifo ? "sequential fifo" : "sequential lifo", r.store, r.status);
				recorded.push_back({"merge sequential", &p, goals, std::move(r)});
			}
			for (unsigned w : {1u, 2u, 4u, 8u})
			{
				auto r = run_concurrent(p, goals, EngineConfig{w, seed, 0});
				check("workers=" + std::to_string(w) + " seed=" + std::to_string(seed), r.store, r.status);
				recorded.push_back({"merge workers=" + std::to_string(w), &p, goals, std::move(r)});
			}
		}
		double secs = seconds_since(t0);
		line(3, bad == 0 && secs < 10.0, "merge sort: " + std::to_string(runs) + " runs over all engines, "
			+ std::to_string(bad) + " without the chain, " + std::to_string(secs) + " s"
			+ (first.empty() ? "" : "; " + first));
	}

	std::vector< Program > fuzz_programs;

	void criterion4()
	{
		std::mt19937 rng(20261017);
		const int total = 500;
		fuzz_programs.reserve(total);
		int skipped = 0;
		int outside = 0;
		std::string first;
		for (int i = 0; i < total; ++i)
		{
			auto fc = fuzz_case(rng);
			fuzz_programs.push_back(parse_program(fc.program));
			const Program& p = fuzz_programs.back();
			auto goals = parse_goals(fc.goals);
			FinalStores oracle;
			try
			{
				oracle = final_stores(AbstractStore::from(goals), p, Limits{10000, 200});
			}
			catch (const LimitExceeded&)
			{
				++skipped;
				continue;
			}
			auto r = run_concurrent(p, goals, EngineConfig{4, static_cast< std::uint64_t >(i), 0});
			std::string c = canonical(r.store.drop_ids());
			if (r.status != Status::Done || !oracle.stores.count(c))
			{
				if (!outside++) first = "case " + std::to_string(i) + " ended in " + c + " for\n" + fc.program + fc.goals;
			}
			recorded.push_back({"fuzz case " + std::to_string(i), &p, goals, std::move(r)});
		}
		double rate = 100.0 * skipped / total;
		line(4, outside == 0 && rate < 5.0, "fuzzing: " + std::to_string(total) + " programs, " + std::to_string(outside)
			+ " results outside the oracle, " + std::to_string(skipped) + " skipped (" + std::to_string(rate) + "%)"
			+ (first.empty() ? "" : "; " + first));
	}

	void criterion5()
	{
		int bad = 0;
		std::string first;
		for (const auto& r : recorded)
		{
			auto v = replay(r.result.trace, r.goals, *r.program);
			auto w = v.passed ? project_abstract(r.result.trace, r.goals, *r.program) : v;
			if (!w.passed && !bad++) first = r.what + ": " + to_string(w);
		}
		line(5, bad == 0, "replay and abstract projection: " + std::to_string(recorded.size()) + " traces, "
			+ std::to_string(bad) + " rejected" + (first.empty() ? "" : "; " + first));
	}

	void criterion6()
	{
		int done = 0;
		int bad = 0;
		std::string first;
		for (const auto& r : recorded)
		{
			if (r.result.status != Status::Done) continue;
			++done;
			auto v = check_final(r.result.trace, r.goals, *r.program);
			if (!v.passed && !bad++) first = r.what + ": " + to_string(v);
		}
		line(6, bad == 0 && done > 0, "final stores: " + std::to_string(done) + " done runs, " + std::to_string(bad)
			+ " not final" + (first.empty() ? "" : "; " + first));
	}

	bool has_overlap(const Trace& t)
	{
		const auto& s = t.steps;
		for (std::size_t i = 0; i < s.size(); ++i)
			for (std::size_t j = i + 1; j < s.size(); ++j)
				if (s[i].worker != s[j].worker && intervals_overlap(s[i], s[j]))
					return true;
		return false;
	}

	void criterion7(const std::vector< Case >& cases)
	{
		int audited = 0;
		int bad = 0;
		std::string first;
		for (const auto& r : recorded)
		{
			if (r.result.trace.engine != "concurrent") continue;
			++audited;
			auto v = audit_overlap(r.result.trace);
			if (!v.passed && !bad++) first = r.what + ": " + to_string(v);
		}

		// The audit must see real overlap on every program.
		std::string missing;
		int searched = 0;
		for (const auto& c : cases)
		{
			++searched;
			bool found = false;
			for (std::uint64_t seed = 0; seed < 2000 && !found; ++seed)
			{
				auto r = run_concurrent(c.program, c.goals, EngineConfig{4, seed, 0});
				auto v = audit_overlap(r.trace);
				if (!v.passed && !bad++) first = c.name + " seed=" + std::to_string(seed) + ": " + to_string(v);
				found = has_overlap(r.trace);
			}
			if (!found) missing += " " + c.name;
		}
		line(7, bad == 0 && missing.empty(), "overlap audit: " + std::to_string(audited) + " traces, " + std::to_string(bad)
			+ " rejected; overlapping pair found for " + std::to_string(searched) + " programs"
			+ (missing.empty() ? "" : ", none for" + missing) + (first.empty() ? "" : "; " + first));
	}

	void criterion8(const std::vector< Case >& cases)
	{
		std::size_t steps = 0;
		std::size_t largest = 0;
		int bad = 0;
		std::string first;
		for (const auto& c : cases)
			for (Policy pol : {Policy::Fifo, Policy::Lifo})
			{
				SequentialOptions o;
				o.policy = pol;
				o.observer = [&](const std::deque< Goal >& gs, const Store& s, const History& h, const TraceStep& t) {
					++steps;
					largest = std::max(largest, s.alive_count());
					std::vector< Goal > v(gs.begin(), gs.end());
					auto verdict = check_active_instances(v, s, h, c.program);
					if (!verdict.passed && !bad++)
						first = c.name + " step " + std::to_string(t.seq) + ": " + verdict.detail;
				};
				run_sequential(c.program, c.goals, o);
			}
		line(8, bad == 0, "active instances: " + std::to_string(steps) + " steps over " + std::to_string(cases.size())
			+ " programs, largest store " + std::to_string(largest) + ", " + std::to_string(bad) + " violations"
			+ (first.empty() ? "" : "; " + first));
	}

	void criterion9()
	{
		struct Control
		{
			std::string name;
			Pitfall kind;
			std::string stuck;
		};
		// Stuck stores: everything activated, nothing fired.
		std::vector< Control > controls{
			{"store_on_drop", Pitfall::StoreOnDrop, "A(1)#1\nB(2)#2\n"},
			{"split_store", Pitfall::SplitStore, "E#1\nB#2\nA#3\nD#4\n"},
			{"multi_step", Pitfall::MultiStepJoin, "A#1\nB#2\n"},
		};
		int bad = 0;
		std::string detail;
		for (const auto& ctl : controls)
		{
			auto c = load_case(ctl.name);
			auto r = run_pitfall(ctl.kind, c.program, c.goals);
			auto v = check_final(r.goals, r.store, r.history, c.program);
			bool ok = r.store.dump() == ctl.stuck && !v.passed;
			// The shipped engine completes the same input.
			auto good = run_concurrent(c.program, c.goals, EngineConfig{2, 0, 0});
			ok = ok && check_final(good.trace, c.goals, c.program).passed;
			if (!ok) ++bad;
			detail += " " + ctl.name + (ok ? " rejected" : " NOT rejected");
		}
		line(9, bad == 0, "negative controls:" + detail);
	}

	void criterion10(const std::vector< Case >& cases)
	{
		int bad = 0;
		std::string first;
		for (const auto& c : cases)
		{
			auto s = run_sequential(c.program, c.goals);
			auto k = run_concurrent(c.program, c.goals, EngineConfig{1, 0, 0});
			if (s.store.dump() != k.store.dump() && !bad++)
				first = c.name + ":\n" + s.store.dump() + "vs\n" + k.store.dump();
		}
		line(10, bad == 0, "workers=1 against sequential fifo: " + std::to_string(cases.size()) + " programs, "
			+ std::to_string(bad) + " differ" + (first.empty() ? "" : "; " + first));
	}

	void scalability()
	{
		auto p = load_case("gcd").program;
		std::mt19937 rng(7);
		std::vector< Constraint > goals;
		for (int i = 0; i < 10000; ++i)
			goals.push_back(Chr{"Gcd", {Term::integer(6 * std::uniform_int_distribution< int >(1, 50)(rng))}});
		double t[2];
		unsigned ws[2] = {1, 8};
		for (int i = 0; i < 2; ++i)
		{
			auto t0 = Clock::now();
			auto r = run_concurrent(p, goals, EngineConfig{ws[i], 1, 0});
			t[i] = seconds_since(t0);
			if (r.store.alive_count() != 1) t[i] = -1;
		}
		std::cout << "INFO scalability: 10000 gcd goals, workers=1 " << t[0] << " s, workers=8 " << t[1] << " s"
			<< (t[1] > 1.1 * t[0] ? " (slower)" : "") << std::endl;
	}
}

int main()
{
	auto cases = corpus();
	auto gcd = load_case("gcd");
	auto get = load_case("get");
	auto merge = load_case("merge");

	criterion1(gcd.program, gcd.goals);
	criterion2(get.program, get.goals);
	criterion3(merge.program, merge.goals);
	criterion4();
	criterion5();
	criterion6();
	criterion7(cases);
	criterion8(cases);
	criterion9();
	criterion10(cases);
	scalability();
	return failures ? 1 : 0;
}
