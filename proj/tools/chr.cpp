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

#include <chr/abstract.hh>
#include <chr/concurrent.hh>
#include <chr/goal_engine.hh>
#include <chr/pitfalls.hh>
#include <chr/verify.hh>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace
{
	using namespace chr;

	enum class Engine { Abstract, Sequential, Concurrent };

	struct Options
	{
		std::string program;
		std::string goals;
		std::string goals_file;
		Engine engine = Engine::Sequential;
		unsigned workers = 1;
		std::uint64_t seed = 0;
		std::uint64_t max_steps = 0;
		Policy policy = Policy::Fifo;
		std::string trace;
		std::string dump_store;
		bool verify = false;
		bool oracle = false;
		bool check_invariants = false;
		unsigned repeat = 0;
		std::string pitfall;
	};

	// Exit codes.
	constexpr int bad_input = 1;
	constexpr int breach = 2;

	struct Breach : std::runtime_error
	{
		using std::runtime_error::runtime_error;
	};

	std::string slurp(const std::string& path)
	{
		std::ifstream in(path);
		if (!in) throw std::runtime_error("cannot read " + path);
		std::ostringstream os;
		os << in.rdbuf();
		return os.str();
	}

	void spit(const std::string& path, const std::string& text)
	{
		std::ofstream out(path);
		if (!out) throw std::runtime_error("cannot write " + path);
		out << text;
	}

	std::uint64_t default_seed()
	{
		const char* s = std::getenv("CHR_SEED");
		return s ? std::strtoull(s, nullptr, 10) : 0;
	}

	std::vector< Constraint > load_goals(const Options& o)
	{
		return parse_goals(o.goals_file.empty() ? o.goals : slurp(o.goals_file));
	}

	bool report(const std::vector< Verdict >& vs)
	{
		bool ok = true;
		for (const auto& v : vs)
		{
			std::cerr << to_string(v) << "\n";
			ok = ok && v.passed;
		}
		return ok;
	}

	RunResult run_once(const Options& o, const Program& p, const std::vector< Constraint >& goals, std::uint64_t seed)
	{
		if (!o.pitfall.empty())
		{
			auto k = pitfall_from_string(o.pitfall);
			if (!k) throw std::runtime_error("unknown pitfall " + o.pitfall);
			return run_pitfall(*k, p, goals, std::max(2u, o.workers));
		}
		if (o.engine == Engine::Concurrent)
			return run_concurrent(p, goals, EngineConfig{o.workers, seed, o.max_steps});

		SequentialOptions so;
		so.policy = o.policy;
		so.max_steps = o.max_steps;
		if (o.check_invariants)
			so.observer = [&p](const std::deque< Goal >& gs, const Store& s, const History& h, const TraceStep& t) {
				std::vector< Goal > v(gs.begin(), gs.end());
				auto verdict = check_active_instances(v, s, h, p);
				if (!verdict.passed)
					throw Breach("after step " + std::to_string(t.seq) + ": " + verdict.detail);
			};
		auto r = run_sequential(p, goals, so);
		r.trace.seed = seed;
		return r;
	}

	int run_abstract_engine(const Options& o, const Program& p, const std::vector< Constraint >& goals)
	{
		auto s = AbstractStore::from(goals);
		if (o.oracle)
		{
			auto fs = final_stores(s, p);
			for (const auto& f : fs.forms())
				std::cout << f << "\n";
			std::cerr << "# final stores=" << fs.stores.size() << " states=" << fs.states << "\n";
			return 0;
		}
		unsigned n = std::max(1u, o.repeat);
		std::map< std::string, unsigned > seen;
		for (unsigned i = 0; i < n; ++i)
		{
			auto f = run_abstract(s, p, o.seed + i, o.max_steps ? o.max_steps : 1000000);
			if (!is_final(f, p)) return bad_input;
			++seen[f.canonical()];
		}
		for (const auto& [form, count] : seen)
			std::cout << (o.repeat ? std::to_string(count) + " " : "") << form << "\n";
		return 0;
	}

	int run_command(const Options& o)
	{
		Program p = parse_program(slurp(o.program));
		auto goals = load_goals(o);
		if (o.engine == Engine::Abstract && o.pitfall.empty())
			return run_abstract_engine(o, p, goals);

		int code = 0;
		unsigned n = std::max(1u, o.repeat);
		std::map< std::string, unsigned > seen;
		for (unsigned i = 0; i < n; ++i)
		{
			auto r = run_once(o, p, goals, o.seed + i);
			if (i == 0)
			{
				if (!o.trace.empty()) spit(o.trace, serialize(r.trace));
				if (!o.dump_store.empty()) spit(o.dump_store, r.store.dump());
			}
			if (!o.repeat)
				std::cout << r.store.dump();
			else
				++seen[canonical(r.store.drop_ids())];
			if (!o.repeat || r.status != Status::Done)
				std::cerr << "# status=" << to_string(r.status) << (o.repeat ? " seed=" + std::to_string(o.seed + i) : "") << "\n";
			if (r.status != Status::Done) code = bad_input;

			if (o.verify)
			{
				std::vector< Verdict > vs;
				if (o.pitfall.empty())
					vs = verify_trace(r.trace, goals, p);
				else
					vs.push_back(check_final(r.goals, r.store, r.history, p));
				if (!report(vs)) code = bad_input;
			}
		}
		for (const auto& [form, count] : seen)
			std::cout << count << " " << form << "\n";
		return code;
	}

	int verify_command(const Options& o)
	{
		Program p = parse_program(slurp(o.program));
		auto goals = load_goals(o);
		Trace t = parse_trace(slurp(o.trace), p);
		return report(verify_trace(t, goals, p)) ? 0 : bad_input;
	}

	void add_input(CLI::App& app, Options& o)
	{
		app.add_option("PROGRAM", o.program, "rule file")->required()->check(CLI::ExistingFile);
		auto* g = app.add_option("--goals", o.goals, "comma separated goals");
		app.add_option("--goals-file", o.goals_file, "file holding the goals")->check(CLI::ExistingFile)->excludes(g);
	}
}

int main(int argc, char** argv)
{
	CLI::App app{"Concurrent goal-based CHR"};
	app.require_subcommand(1);
	Options o;
	o.seed = default_seed();

	auto* run = app.add_subcommand("run", "run a program and print the final store");
	add_input(*run, o);
	std::map< std::string, Engine > engines{{"abstract", Engine::Abstract}, {"sequential", Engine::Sequential},
		{"concurrent", Engine::Concurrent}};
	run->add_option("--engine", o.engine, "abstract, sequential or concurrent")
		->transform(CLI::CheckedTransformer(engines, CLI::ignore_case));
	run->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
	run->add_option("--seed", o.seed, "random seed, CHR_SEED by default");
	run->add_option("--max-steps", o.max_steps, "abort after this many steps, 0 for no bound");
	std::map< std::string, Policy > policies{{"fifo", Policy::Fifo}, {"lifo", Policy::Lifo}};
	run->add_option("--policy", o.policy, "goal order of the sequential engine")
		->transform(CLI::CheckedTransformer(policies, CLI::ignore_case));
	run->add_option("--trace", o.trace, "write the trace here");
	run->add_option("--dump-store", o.dump_store, "write the final store here");
	run->add_flag("--verify", o.verify, "check the trace");
	run->add_flag("--oracle", o.oracle, "list all final stores (abstract engine)");
	run->add_option("--repeat", o.repeat, "run with seeds seed..seed+N-1 and list distinct results");
	run->add_flag("--check-invariants", o.check_invariants, "check active instances after each step");
	run->add_option("--pitfall", o.pitfall)->group("");

	auto* verify = app.add_subcommand("verify", "check a recorded trace");
	add_input(*verify, o);
	verify->add_option("--trace", o.trace, "trace file")->required()->check(CLI::ExistingFile);

	CLI11_PARSE(app, argc, argv);

	try
	{
		return run->parsed() ? run_command(o) : verify_command(o);
	}
	catch (const Breach& e)
	{
		std::cerr << "invariant breach " << e.what() << "\n";
		return breach;
	}
	catch (const ParseError& e)
	{
		std::cerr << "parse error " << e.what() << "\n";
		return bad_input;
	}
	catch (const std::exception& e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return bad_input;
	}
}
