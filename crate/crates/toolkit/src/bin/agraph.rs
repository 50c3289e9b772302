use std::process::ExitCode;

use agraph_toolkit::memory::TrackingAllocator;

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

fn main() -> ExitCode {
    ExitCode::from(agraph_toolkit::cli::run(std::env::args_os()))
}
