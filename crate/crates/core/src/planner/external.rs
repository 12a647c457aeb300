use std::fs;
use std::path::Path;
use std::process::{Command, ExitStatus, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::ground::GroundTask;
use super::validate::{validate_plan, PlanError};
use super::{Budget, SearchResult, SearchStatus, Statistics};
use crate::pddl::{parse_plan, PddlError};

/// Exit codes with which solvers in the Fast Downward family report that the
/// task has no solution.
const UNSOLVABLE_EXIT_CODES: [i32; 2] = [11, 12];
const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("solver command template must contain {{domain}}, {{problem}} and {{plan}}: `{0}`")]
    Template(String),
    #[error("could not run solver: {0}")]
    SolverLaunchFailure(String),
    #[error("solver plan could not be parsed: {0}")]
    PlanParse(#[from] PddlError),
    #[error("solver plan is invalid for the task: {0}")]
    PlanInvalid(#[from] PlanError),
}

fn shell_quote(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', r"'\''"))
}

fn wait(child: &mut std::process::Child, deadline: Instant) -> std::io::Result<Option<ExitStatus>> {
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(Some(status));
        }
        if Instant::now() >= deadline {
            return Ok(None);
        }
        thread::sleep(POLL);
    }
}

#[cfg(unix)]
fn kill_group(child: &mut std::process::Child) {
    // The solver runs in its own process group so helper processes die too.
    if let Ok(pgid) = libc::pid_t::try_from(child.id()) {
        // SAFETY: killpg has no memory-safety preconditions; the group was
        // created for this child alone.
        unsafe {
            libc::killpg(pgid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
    let _ = child.wait();
}

#[cfg(not(unix))]
fn kill_group(child: &mut std::process::Child) {
    let _ = child.kill();
    let _ = child.wait();
}

/// Runs an external planner on the given texts and validates its plan against
/// `task`. `template` is a shell command with `{domain}`, `{problem}` and
/// `{plan}` placeholders, replaced by quoted file paths in a scratch directory.
pub fn solve_external(
    domain_text: &str,
    problem_text: &str,
    template: &str,
    task: &GroundTask,
    budget: &Budget,
) -> Result<SearchResult, ExternalError> {
    if !["{domain}", "{problem}", "{plan}"].iter().all(|p| template.contains(p)) {
        return Err(ExternalError::Template(template.to_string()));
    }
    let start = Instant::now();
    let launch = |e: std::io::Error| ExternalError::SolverLaunchFailure(e.to_string());
    let dir = tempfile::tempdir().map_err(launch)?;
    let domain = dir.path().join("domain.pddl");
    let problem = dir.path().join("problem.pddl");
    let plan_path = dir.path().join("plan.txt");
    fs::write(&domain, domain_text).map_err(launch)?;
    fs::write(&problem, problem_text).map_err(launch)?;
    let command = template
        .replace("{domain}", &shell_quote(&domain))
        .replace("{problem}", &shell_quote(&problem))
        .replace("{plan}", &shell_quote(&plan_path));

    let log = fs::File::create(dir.path().join("solver.log")).map_err(launch)?;
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(&command)
        .current_dir(dir.path())
        .stdin(Stdio::null())
        .stdout(log.try_clone().map_err(launch)?)
        .stderr(log);
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let mut child = cmd.spawn().map_err(launch)?;

    let stats = |start: Instant| Statistics { wall_time: start.elapsed(), ..Default::default() };
    let Some(status) = wait(&mut child, start + budget.time_limit).map_err(launch)? else {
        kill_group(&mut child);
        return Ok(SearchResult { status: SearchStatus::Timeout, plan: None, statistics: stats(start) });
    };
    if status.code().is_some_and(|c| UNSOLVABLE_EXIT_CODES.contains(&c)) {
        return Ok(SearchResult { status: SearchStatus::Unsolvable, plan: None, statistics: stats(start) });
    }
    if !plan_path.exists() {
        let output = fs::read_to_string(dir.path().join("solver.log")).unwrap_or_default();
        let tail: String =
            output.lines().rev().take(5).collect::<Vec<_>>().into_iter().rev().collect::<Vec<_>>().join("\n");
        return Err(ExternalError::SolverLaunchFailure(format!(
            "solver exited with {status} and wrote no plan{}{tail}",
            if tail.is_empty() { "" } else { ":\n" }
        )));
    }
    let text = fs::read_to_string(&plan_path).map_err(launch)?;
    let mut plan = parse_plan(&text)?;
    let cost = validate_plan(task, &plan)?;
    plan.declared_cost.get_or_insert(cost);
    Ok(SearchResult { status: SearchStatus::Solved, plan: Some(plan), statistics: stats(start) })
}
