import json
import os
import tempfile
import unittest
from unittest.mock import patch

from src.torus_characters import TorusCharacter
from src.utils import (
    ROOT_DIR,
    RunConfig,
    build_config,
    config_dir,
    load_settings,
    resolve_character,
    resolve_characters,
    resolve_subgroup,
    setup_logging,
)


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.p, 3)
        self.assertEqual(config.context().M, 64)
        self.assertEqual(config.to_dict()["characters"], [])

    def test_from_dict_converts_lists(self):
        config = RunConfig.from_dict({"matrix": [[1, 0], [0, 3]], "samples": [2, 4], "characters": ["1"]})
        self.assertEqual(config.matrix, ((1, 0), (0, 3)))
        self.assertEqual(config.samples, (2, 4))
        self.assertEqual(config.to_dict()["matrix"], [[1, 0], [0, 3]])

    def test_rejects_unknown_keys(self):
        with self.assertRaises(ValueError):
            RunConfig.from_dict({"precision": 10})

    def test_validation(self):
        with self.assertRaises(ValueError):
            RunConfig(level=0)
        with self.assertRaises(ValueError):
            RunConfig(subgroup="borel")
        with self.assertRaises(ValueError):
            RunConfig(mode="other")


class TestSettings(unittest.TestCase):

    def test_missing_file(self):
        with tempfile.TemporaryDirectory() as directory:
            self.assertEqual(load_settings(directory), {})

    def test_build_config_merges(self):
        with tempfile.TemporaryDirectory() as directory:
            with open(os.path.join(directory, "user_settings.json"), "w", encoding="utf-8") as f:
                json.dump({"p": 5, "prec": 8}, f)
            config = build_config({"prec": 12, "trunc": None}, directory)
        self.assertEqual((config.p, config.prec, config.trunc), (5, 12, 64))

    def test_settings_must_be_object(self):
        with tempfile.TemporaryDirectory() as directory:
            with open(os.path.join(directory, "user_settings.json"), "w", encoding="utf-8") as f:
                f.write("[1, 2]")
            with self.assertRaises(ValueError):
                load_settings(directory)

    @patch('src.utils.os.getenv')
    def test_config_dir_from_environment(self, mock_getenv):
        mock_getenv.return_value = '/tmp/iwasawa'
        self.assertEqual(config_dir(), '/tmp/iwasawa')
        mock_getenv.return_value = None
        self.assertEqual(config_dir(), ROOT_DIR)

    def test_setup_logging_rejects_unknown_level(self):
        with self.assertRaises(ValueError):
            setup_logging("LOUD")


class TestResolvers(unittest.TestCase):

    def setUp(self):
        self.config = RunConfig(prec=16, trunc=16)
        self.ctx = self.config.context()

    def test_closed_form_and_file_agree(self):
        from_file = resolve_character(self.ctx, os.path.join(ROOT_DIR, "data", "a1_dm1.json"))
        closed = resolve_character(self.ctx, "a d^-1")
        self.assertTrue(from_file.agrees_with(closed))

    def test_missing_characters_are_trivial(self):
        chi_prime, chi = resolve_characters(self.config, self.ctx, 2)
        self.assertTrue(chi_prime.is_trivial())
        self.assertTrue(chi.agrees_with(TorusCharacter.trivial(self.ctx)))

    def test_unipotent_subgroup(self):
        ambient, ideal = resolve_subgroup(RunConfig(p=3, level=1))
        self.assertEqual(len(ambient), 3)
        self.assertEqual(len(ideal.subgroup_generators), 1)

    def test_kernel_subgroup(self):
        ambient, ideal = resolve_subgroup(RunConfig(p=2, level=2, subgroup="kernel"))
        self.assertEqual(len(ambient), 96)
        self.assertEqual(len(ideal.subgroup_generators), 15)


if __name__ == '__main__':
    unittest.main()
