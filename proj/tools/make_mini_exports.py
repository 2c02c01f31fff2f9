#!/usr/bin/env python3
"""Writes the tracker and pull-request exports of the mini fixture project.

The repository snapshot under tests/fixtures/mini/repo is the buggy state.
Each fix below is a text substitution on one of its files; the PR patch is
the unified diff of that substitution.
"""
import difflib
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "mini"
REPO = ROOT / "repo"
SRC = "src/main/java/org/example"

FIXES = {
    "MINI-1": (f"{SRC}/config/ConfigReader.java",
               "        String target = conf.getString(TARGET);\n        return target.trim();\n",
               "        String target = conf.getString(TARGET);\n        if (target == null) {\n"
               "            return DEFAULT_TARGET;\n        }\n        return target.trim();\n"),
    "MINI-2": (f"{SRC}/util/Buffers.java",
               "        for (int i = 0; i <= size; i++) {\n",
               "        for (int i = 0; i < size; i++) {\n"),
    "MINI-3": (f"{SRC}/text/Names.java",
               "        return owner == other;\n",
               "        return Objects.equals(owner, other);\n"),
    "MINI-4": (f"{SRC}/io/LineCounter.java",
               "        BufferedReader reader = new BufferedReader(source);\n        int lines = 0;\n"
               "        while (reader.readLine() != null) {\n            lines++;\n        }\n",
               "        int lines = 0;\n        try (BufferedReader reader = new BufferedReader(source)) {\n"
               "            while (reader.readLine() != null) {\n                lines++;\n            }\n"
               "        }\n"),
    "MINI-5": (f"{SRC}/config/RetryPolicy.java",
               "        if (attempt > maxRetries) {\n            return -1;\n        }\n"
               "        long delay = backoffMillis * attempt;\n",
               "        if (attempt >= maxRetries) {\n            return -1;\n        }\n"
               "        long delay = backoffMillis * (1L << attempt);\n"),
    "MINI-6": (f"{SRC}/util/PathJoiner.java",
               "        }\n        return base + child;\n",
               "        }\n        return base + \"/\" + child;\n"),
    "MINI-7": (f"{SRC}/util/PathJoiner.java",
               "        if (base.endsWith(\"/\")) {\n",
               "        if (base.isEmpty() || base.endsWith(\"/\")) {\n"),
    "MINI-8": ("src/test/java/org/example/config/ConfigReaderTest.java",
               "        conf.setString(ConfigReader.TARGET, \" remote \");\n",
               "        conf.setString(ConfigReader.TARGET, \"remote\");\n"),
    "MINI-10": (f"{SRC}/util/Buffers.java",
                "        return best;\n",
                "        return best;\n" + "".join(f"        // step {i}\n" for i in range(23))),
    "MINI-12": (f"{SRC}/config/Configuration.java",
                "        return values.containsKey(key);\n",
                "        return key != null && values.containsKey(key);\n"),
    "MINI-13": (f"{SRC}/config/ConfigReader.java",
                "import java.util.Map;\n",
                "import java.util.Map;\nimport java.util.Objects;\n"),
    "MINI-14": (f"{SRC}/config/RetryPolicy.java",
                "        return delay;\n",
                "        return Math.max(0, delay);\n"),
}


def patch_for(key):
    path, old, new = FIXES[key]
    before = (REPO / path).read_text()
    if before.count(old) != 1:
        sys.exit(f"{key}: expected exactly one match in {path}")
    after = before.replace(old, new)
    diff = difflib.unified_diff(before.splitlines(), after.splitlines(), n=3, lineterm="")
    lines = [l for l in diff if not l.startswith(("---", "+++"))]
    return path, "\n".join(lines) + "\n"


def pr(number, keys_text, title, files, merged=True):
    return {
        "number": number,
        "title": title,
        "body": keys_text,
        "merged_at": "2024-03-01T10:00:00Z" if merged else None,
        "base": {"sha": "4f2a9c1"},
        "files": [{"filename": p, "patch": d} for p, d in files],
    }


def comment(author, created, body):
    return {"author": {"displayName": author}, "created": created, "body": body}


def issue(key, summary, description, status, comments):
    return {
        "key": key,
        "fields": {
            "summary": summary,
            "description": description,
            "status": {"name": status},
            "comment": {"comments": comments},
        },
    }


def main():
    issues = [
        issue("MINI-1", "ConfigReader.targetName throws NullPointerException when pipeline.target is unset",
              "Jobs submitted without pipeline.target crash during startup.", "Closed", [
                  comment("alice", "2024-02-01T09:00:00Z",
                          "Stack trace from the failing job:\n{code}\njava.lang.NullPointerException\n"
                          "\tat org.example.config.ConfigReader.targetName(ConfigReader.java:22)\n{code}"),
                  comment("bob", "2024-02-01T10:30:00Z",
                          "I think we should add a null check for the TARGET parameter and fall back to the default target."),
                  comment("carol", "2024-02-02T08:15:00Z",
                          "+1 to the null check. Falling back to local keeps existing jobs working."),
              ]),
        issue("MINI-2", "Buffers.sum reads past the requested size",
              "sum(values, n) adds values[n] as well.", "Resolved", [
                  comment("dave", "2024-02-03T11:00:00Z",
                          "The loop condition uses <= so it reads one element past the end. It should stop before size."),
              ]),
        issue("MINI-3", "Names.sameOwner compares owners by reference",
              "Owners loaded from different sources never compare equal.", "Closed", [
                  comment("erin", "2024-02-04T12:00:00Z",
                          "We should compare the owner strings by value with equals."),
                  comment("frank", "2024-02-04T13:00:00Z",
                          "owner.equals(other) would throw for a null owner. Use Objects.equals like sameLabel does:\n"
                          "```\nreturn Objects.equals(label, other);\n```"),
              ]),
        issue("MINI-4", "LineCounter.count leaks the reader",
              "File handles stay open after counting lines.", "Closed", [
                  comment("grace", "2024-02-05T09:00:00Z",
                          "count never closes the BufferedReader. Wrapping it in try-with-resources fixes the leak."),
                  comment("heidi", "2024-02-05T09:40:00Z",
                          "Agreed, isEmpty already does it that way."),
              ]),
        issue("MINI-5", "RetryPolicy retries once too often and does not back off",
              "delayFor allows maxRetries + 1 attempts and the delay grows linearly.", "Closed", [
                  comment("ivan", "2024-02-06T15:00:00Z", "Also affects 1.2."),
              ]),
        issue("MINI-6", "PathJoiner.join drops the separator",
              "join(\"a\", \"b\") returns \"ab\".", "Closed", []),
        issue("MINI-7", "PathJoiner.join mishandles an empty base",
              "An empty base should not get a separator.", "Open", []),
        issue("MINI-8", "ConfigReaderTest relies on trimming",
              "The test passes a padded value.", "Closed", []),
        issue("MINI-9", "Rename pipeline options",
              "Options move to the job namespace.", "Closed", []),
        issue("MINI-10", "Buffers.max needs step comments",
              "Document the algorithm.", "Closed", []),
        issue("MINI-11", "Configuration is not thread safe",
              "Concurrent setString calls lose updates.", "Closed", []),
        issue("MINI-12", "Configuration.contains throws on null keys",
              "contains(null) throws.", "Closed", []),
        issue("MINI-13", "ConfigReader should import Objects",
              "Preparation for a later change.", "Closed", []),
        issue("MINI-14", "RetryPolicy.delayFor can return negative delays",
              "Overflow makes the delay negative.", "Closed", []),
    ]

    prs = [
        pr(101, "Fixes MINI-1.", "Fall back to the default target", [patch_for("MINI-1")]),
        pr(102, "Fixes MINI-2", "Stop Buffers.sum at size", [patch_for("MINI-2")]),
        pr(103, "See MINI-3.", "Compare owners by value", [patch_for("MINI-3")]),
        pr(104, "Closes MINI-4", "Close the reader in LineCounter", [patch_for("MINI-4")]),
        pr(105, "MINI-5: two fixes in delayFor", "Fix retry bound and backoff", [patch_for("MINI-5")]),
        pr(106, "Fixes MINI-6", "Add the missing separator", [patch_for("MINI-6")]),
        pr(107, "Fixes MINI-7", "Handle empty base", [patch_for("MINI-7")]),
        pr(108, "Fixes MINI-8", "Unpadded test value", [patch_for("MINI-8")]),
        pr(109, "Fixes MINI-9", "Rename options",
           [patch_for("MINI-1"), patch_for("MINI-2")]),
        pr(110, "Fixes MINI-10", "Comment Buffers.max", [patch_for("MINI-10")]),
        pr(111, "Fixes MINI-12", "Null-safe contains", [patch_for("MINI-12")]),
        pr(112, "Follow-up for MINI-12", "Null-safe contains, take two", [patch_for("MINI-12")]),
        pr(113, "Fixes MINI-13", "Import Objects", [patch_for("MINI-13")]),
        pr(114, "Fixes MINI-14", "Clamp the delay", [patch_for("MINI-14")], merged=False),
    ]

    (ROOT / "issues.json").write_text(json.dumps({"issues": issues}, indent=2) + "\n")
    (ROOT / "prs.json").write_text(json.dumps(prs, indent=2) + "\n")


if __name__ == "__main__":
    main()
