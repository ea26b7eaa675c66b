//! One function per subcommand. Each builds its complete result in
//! memory and hands it back; nothing is written until a command has
//! fully succeeded.

use std::collections::BTreeMap;
use std::path::Path;

use refswap_core::builder::{
    balance_sample, compile_patterns, mine as mine_pairs, parse_exceptions, parse_rules,
    parse_suffix_rules, parse_wordlist, read_candidates, swap_terms, write_candidates, BuildError,
    Quota, SwapLexicon, WordLists,
};
use refswap_core::builtin;
use refswap_core::corpus::{
    parse_corpus_with, stats as corpus_stats, validate as validate_corpus, Category, ColumnMap,
    Corpus, CorpusStats, GenderForm, Severity, SpeakerGender,
};
use refswap_core::eval::{evaluate, render_report, Hypotheses, ReportFormat};

use crate::{
    file_stem, read_file, BalanceArgs, CliError, CorpusInput, EvalArgs, MineArgs, Outputs,
    OutputFormat, StatsArgs, SwapArgs, ValidateArgs,
};

fn load_corpus(input: &CorpusInput) -> Result<Corpus, CliError> {
    let text = read_file(&input.corpus)?;
    let columns = match &input.columns {
        Some(spec) => ColumnMap::from_spec(spec).map_err(|e| CliError::Usage(e.to_string()))?,
        None => ColumnMap::default(),
    };
    let language_pair = input
        .language_pair
        .clone()
        .unwrap_or_else(|| file_stem(&input.corpus));
    parse_corpus_with(&text, &language_pair, &columns)
        .map_err(|e| CliError::Validation(format!("{}: {e}", input.corpus.display())))
}

pub(crate) fn validate(args: &ValidateArgs) -> Result<Outputs, CliError> {
    let corpus = load_corpus(&args.corpus)?;
    let issues = validate_corpus(&corpus);
    let errors = issues.iter().filter(|i| i.severity == Severity::Error).count();
    let warnings = issues.len() - errors;
    let mut text = String::new();
    for issue in &issues {
        text.push_str(&issue.to_string());
        text.push('\n');
    }
    eprintln!(
        "refswap: {} record(s), {errors} error(s), {warnings} warning(s)",
        corpus.len()
    );
    Ok(Outputs {
        primary: text,
        extra_files: Vec::new(),
        exit_code: if errors > 0 { 1 } else { 0 },
    })
}

fn render_stats(stats: &CorpusStats, format: OutputFormat) -> String {
    let rows: Vec<(&str, usize)> = vec![
        ("cat1/feminine", stats.count(Category::Cat1, GenderForm::Feminine)),
        ("cat1/masculine", stats.count(Category::Cat1, GenderForm::Masculine)),
        ("cat2/feminine", stats.count(Category::Cat2, GenderForm::Feminine)),
        ("cat2/masculine", stats.count(Category::Cat2, GenderForm::Masculine)),
        ("cat1/total", stats.category_total(Category::Cat1)),
        ("cat2/total", stats.category_total(Category::Cat2)),
        ("all/feminine", stats.form_total(GenderForm::Feminine)),
        ("all/masculine", stats.form_total(GenderForm::Masculine)),
        ("speakers/female", stats.speaker_count(SpeakerGender::Female)),
        ("speakers/male", stats.speaker_count(SpeakerGender::Male)),
        ("total/records", stats.total_records),
        ("total/term-tokens", stats.total_term_tokens),
    ];
    match format {
        OutputFormat::Md => {
            let mut out = String::from("# Corpus statistics\n\n");
            out.push_str("| | Feminine | Masculine | Total |\n");
            out.push_str("|---|---:|---:|---:|\n");
            for category in [Category::Cat1, Category::Cat2] {
                out.push_str(&format!(
                    "| Category {} | {} | {} | {} |\n",
                    category.as_field(),
                    stats.count(category, GenderForm::Feminine),
                    stats.count(category, GenderForm::Masculine),
                    stats.category_total(category),
                ));
            }
            out.push_str(&format!(
                "| Total | {} | {} | {} |\n",
                stats.form_total(GenderForm::Feminine),
                stats.form_total(GenderForm::Masculine),
                stats.total_records,
            ));
            out.push_str(&format!(
                "\n- annotated term tokens: {}\n- speakers: {} female / {} male\n",
                stats.total_term_tokens,
                stats.speaker_count(SpeakerGender::Female),
                stats.speaker_count(SpeakerGender::Male),
            ));
            out
        }
        OutputFormat::Tsv => {
            let mut out = String::from("KEY\tVALUE\n");
            for (key, value) in rows {
                out.push_str(&format!("{key}\t{value}\n"));
            }
            out
        }
        OutputFormat::Json => {
            let map: BTreeMap<&str, usize> = rows.into_iter().collect();
            let mut text = serde_json::to_string_pretty(&map).expect("stats serialize");
            text.push('\n');
            text
        }
    }
}

pub(crate) fn stats(args: &StatsArgs) -> Result<Outputs, CliError> {
    let corpus = load_corpus(&args.corpus)?;
    let stats = corpus_stats(&corpus);
    Ok(Outputs::primary(render_stats(&stats, args.format)))
}

pub(crate) fn eval(args: &EvalArgs) -> Result<Outputs, CliError> {
    let corpus = load_corpus(&args.corpus)?;
    let hyp_text = read_file(&args.hyp)?;
    let hyps = Hypotheses::from_text(file_stem(&args.hyp), &hyp_text);
    if hyps.len() != corpus.len() {
        return Err(CliError::Validation(format!(
            "hypotheses {} has {} lines but corpus {} has {} records",
            args.hyp.display(),
            hyps.len(),
            args.corpus.corpus.display(),
            corpus.len()
        )));
    }

    let issues = validate_corpus(&corpus);
    for issue in issues.iter().filter(|i| i.severity == Severity::Warning) {
        eprintln!("refswap: {issue}");
    }
    let bad_ids: Vec<String> = issues
        .iter()
        .filter(|i| i.severity == Severity::Error)
        .map(|i| i.record_id.clone())
        .collect();
    let (corpus, hyps) = if bad_ids.is_empty() {
        (corpus, hyps)
    } else if !args.force {
        for issue in issues.iter().filter(|i| i.severity == Severity::Error) {
            eprintln!("refswap: {issue}");
        }
        return Err(CliError::Validation(format!(
            "corpus has {} validation error(s); fix them or pass --force",
            bad_ids.len()
        )));
    } else {
        for issue in issues.iter().filter(|i| i.severity == Severity::Error) {
            eprintln!("refswap: {issue}");
        }
        let keep: Vec<usize> = (0..corpus.len())
            .filter(|&i| !bad_ids.contains(&corpus.records()[i].id))
            .collect();
        let excluded = corpus.len() - keep.len();
        eprintln!("refswap: --force: excluded {excluded} invalid record(s)");
        let records: Vec<_> = keep.iter().map(|&i| corpus.records()[i].clone()).collect();
        let lines: Vec<String> = keep.iter().map(|&i| hyps.lines()[i].clone()).collect();
        let kept = Corpus::from_records(corpus.language_pair.clone(), records).map_err(|_| {
            CliError::Validation("no valid records left after --force exclusion".into())
        })?;
        (kept, Hypotheses::from_lines(hyps.label.clone(), lines))
    };

    let report = evaluate(&corpus, &hyps).map_err(|e| CliError::Validation(e.to_string()))?;
    let format = match args.format {
        OutputFormat::Md => ReportFormat::Markdown,
        OutputFormat::Tsv => ReportFormat::Tsv,
        OutputFormat::Json => ReportFormat::Structured,
    };
    Ok(Outputs::primary(render_report(&report, format)))
}

fn load_wordlist(path: &Option<std::path::PathBuf>) -> Result<Option<Vec<String>>, CliError> {
    match path {
        Some(path) => Ok(Some(parse_wordlist(&read_file(path)?))),
        None => Ok(None),
    }
}

fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(Option<String>, String, String)>, CliError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty pairs file", path.display())))?;
    let header: Vec<&str> = header.split('\t').map(str::trim).collect();
    let has_talk = match header.as_slice() {
        ["SRC", "TGT"] => false,
        ["TALK", "SRC", "TGT"] => true,
        _ => {
            return Err(CliError::Validation(format!(
                "{}: pairs header must be SRC\\tTGT or TALK\\tSRC\\tTGT",
                path.display()
            )))
        }
    };
    let mut pairs = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != header.len() {
            return Err(CliError::Validation(format!(
                "{}: line {}: expected {} fields, found {}",
                path.display(),
                idx + 1,
                header.len(),
                fields.len()
            )));
        }
        if has_talk {
            pairs.push((
                Some(fields[0].trim().to_string()),
                fields[1].to_string(),
                fields[2].to_string(),
            ));
        } else {
            pairs.push((None, fields[0].to_string(), fields[1].to_string()));
        }
    }
    Ok(pairs)
}

fn parse_speakers(text: &str, path: &Path) -> Result<BTreeMap<String, SpeakerGender>, CliError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty speakers file", path.display())))?;
    if header.split('\t').map(str::trim).collect::<Vec<_>>() != ["TALK", "SPEAKER"] {
        return Err(CliError::Validation(format!(
            "{}: speakers header must be TALK\\tSPEAKER",
            path.display()
        )));
    }
    let mut map = BTreeMap::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let speaker = fields.get(1).map(|s| s.trim());
        let speaker = match speaker {
            Some("F") | Some("female") | Some("Female") => SpeakerGender::Female,
            Some("M") | Some("male") | Some("Male") => SpeakerGender::Male,
            _ => {
                return Err(CliError::Validation(format!(
                    "{}: line {}: SPEAKER must be F or M",
                    path.display(),
                    idx + 1
                )))
            }
        };
        map.insert(fields[0].trim().to_string(), speaker);
    }
    Ok(map)
}

pub(crate) fn mine(args: &MineArgs) -> Result<Outputs, CliError> {
    let rules = match (&args.rules, &args.language_pair) {
        (Some(path), _) => parse_rules(&read_file(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        (None, Some(pair)) => builtin::mining_rules(pair).ok_or_else(|| {
            CliError::Usage(format!("no built-in rules for language pair '{pair}'"))
        })?,
        (None, None) => {
            return Err(CliError::Usage(
                "pass --rules FILE or --language-pair to select built-in rules".into(),
            ))
        }
    };

    let builtin_lists = args
        .language_pair
        .as_deref()
        .and_then(builtin::word_lists)
        .unwrap_or_default();
    let lists = WordLists {
        occupations: load_wordlist(&args.occupations)?.unwrap_or(builtin_lists.occupations),
        adjectives_f: load_wordlist(&args.adjectives_f)?.unwrap_or(builtin_lists.adjectives_f),
        adjectives_m: load_wordlist(&args.adjectives_m)?.unwrap_or(builtin_lists.adjectives_m),
    };
    let patterns =
        compile_patterns(&rules, &lists).map_err(|e| CliError::Validation(e.to_string()))?;

    let pairs = parse_pairs(&read_file(&args.pairs)?, &args.pairs)?;
    let speakers = match &args.speakers {
        Some(path) => parse_speakers(&read_file(path)?, path)?,
        None => BTreeMap::new(),
    };

    let plain: Vec<(String, String)> = pairs
        .iter()
        .map(|(_, src, tgt)| (src.clone(), tgt.clone()))
        .collect();
    let mut candidates = mine_pairs(&plain, &patterns);
    for candidate in candidates.iter_mut() {
        let talk = pairs[candidate.pair_index].0.clone();
        if let Some(talk) = &talk {
            candidate.speaker = speakers.get(talk).copied();
        }
        candidate.talk = talk;
    }
    eprintln!(
        "refswap: {} candidate(s) from {} pair(s)",
        candidates.len(),
        plain.len()
    );
    Ok(Outputs::primary(write_candidates(&candidates)))
}

pub(crate) fn balance(args: &BalanceArgs) -> Result<Outputs, CliError> {
    let quota = Quota::from_spec(&args.quota).map_err(CliError::Usage)?;
    let candidates = read_candidates(&read_file(&args.candidates)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.candidates.display())))?;
    let outcome = balance_sample(&candidates, &quota, args.seed);
    for s in &outcome.shortfalls {
        eprintln!(
            "refswap: shortfall: category {} {}: requested {}, available {}",
            s.category.as_field(),
            match s.form {
                GenderForm::Feminine => "feminine",
                GenderForm::Masculine => "masculine",
            },
            s.requested,
            s.available
        );
    }
    eprintln!(
        "refswap: selected {} of {} candidate(s)",
        outcome.selected.len(),
        candidates.len()
    );
    Ok(Outputs::primary(write_candidates(&outcome.selected)))
}

fn load_lexicon(args: &SwapArgs) -> Result<SwapLexicon, CliError> {
    if args.exceptions.is_none() && args.suffix_rules.is_none() {
        return Ok(builtin::lexicon().clone());
    }
    let mut lexicon = SwapLexicon::default();
    if let Some(path) = &args.exceptions {
        parse_exceptions(&read_file(path)?, &mut lexicon)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &args.suffix_rules {
        parse_suffix_rules(&read_file(path)?, &mut lexicon)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    }
    Ok(lexicon)
}

pub(crate) fn swap(args: &SwapArgs) -> Result<Outputs, CliError> {
    let lexicon = load_lexicon(args)?;
    let text = read_file(&args.input)?;
    let candidates = read_candidates(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.input.display())))?;

    let mut out =
        String::from("ID\tTALK\tSRC\tREF-C\tREF-W\tSPEAKER\tFORM\tCATEGORY\tTERMS\n");
    let mut review_rows: Vec<String> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for candidate in &candidates {
        let id = format!("p{}-{}", candidate.pair_index + 1, candidate.rule_id);
        let terms = candidate.term_tokens();
        let swapped = if terms.is_empty() {
            Err(BuildError::BadLexicon("row lists no term tokens".into()))
        } else {
            swap_terms(&candidate.target, &terms, &args.language, &lexicon)
        };
        match swapped {
            Ok((wrong, pairs)) => {
                let terms_field = pairs
                    .iter()
                    .map(|p| format!("{}:{}", p.correct_form, p.wrong_form))
                    .collect::<Vec<_>>()
                    .join(";");
                out.push_str(&format!(
                    "{id}\t{}\t{}\t{}\t{wrong}\t{}\t{}\t{}\t{terms_field}\n",
                    candidate.talk.as_deref().unwrap_or(""),
                    candidate.source,
                    candidate.target,
                    candidate.speaker.map(|s| s.as_field()).unwrap_or(""),
                    candidate.form.as_field(),
                    candidate.category.as_field(),
                ));
            }
            Err(e) => {
                failures.push(format!("{id}: {e}"));
                review_rows.push(write_candidates(std::slice::from_ref(candidate)));
            }
        }
    }

    for failure in &failures {
        eprintln!("refswap: review: {failure}");
    }
    if failures.is_empty() {
        return Ok(Outputs::primary(out));
    }
    match &args.review {
        Some(path) => {
            let mut review = String::new();
            for (i, row) in review_rows.iter().enumerate() {
                if i == 0 {
                    review.push_str(row);
                } else {
                    // Skip the repeated header.
                    review.extend(row.lines().skip(1).map(|l| format!("{l}\n")));
                }
            }
            eprintln!(
                "refswap: routed {} row(s) to {} for human review",
                failures.len(),
                path.display()
            );
            Ok(Outputs {
                primary: out,
                extra_files: vec![(path.clone(), review)],
                exit_code: 0,
            })
        }
        None => Err(CliError::Validation(format!(
            "{} row(s) cannot be swapped mechanically; rerun with --review FILE to route them:\n{}",
            failures.len(),
            failures.join("\n")
        ))),
    }
}
