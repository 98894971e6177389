#![no_main]

use alignment_cli::document::{parse_game_spec, parse_solution, render, solution_to_json};
use libfuzzer_sys::fuzz_target;

const GAMES: [&str; 3] = [
    r#"{"domain":"finite","costs":[2,1,3],"penalties":[1,4,1],"hider":{"type":"power_set"},"searcher":{"type":"fixed_cardinality","k":1}}"#,
    r#"{"domain":"circle","costs":1,"penalties":3,"hider":{"type":"free_length"},"searcher":{"type":"free_length"}}"#,
    r#"{"domain":"interval","costs":1,"hider":{"type":"fixed_length","value":"2/5"},"searcher":{"type":"fixed_length","value":"2/5"}}"#,
];

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let spec = parse_game_spec(GAMES[usize::from(selector) % GAMES.len()]).expect("fixed game parses");
    if let Ok(solution) = parse_solution(text, &spec) {
        let again = parse_solution(&render(&solution_to_json(&spec, &solution)), &spec).expect("rendered solution parses");
        assert_eq!(again, solution);
    }
});
